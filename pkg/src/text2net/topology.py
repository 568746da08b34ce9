"""Structured topology document: devices, interfaces, routes, connections.

The JSON serialization is versioned ("t2n-topology/1") and canonical:
devices sorted by hostname, interfaces by name, routes by destination,
connections by endpoint pair, object keys sorted. Two topologies are
interchangeable exactly when their canonical JSON is byte-identical,
which is what the narrative-invariance tests assert.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import ip

SCHEMA_VERSION = "t2n-topology/1"

NODE_TYPES = ("router", "switch", "pc")


@dataclass
class InterfaceSpec:
    name: str
    ipv4: str
    prefix_len: int
    network_id: int | None = None

    @property
    def is_loopback(self) -> bool:
        return self.name.startswith("Loopback")

    def subnet(self) -> tuple[int, int]:
        """(network, prefix_len) of the attached subnet."""
        return ip.network_int(ip.parse_ipv4(self.ipv4), self.prefix_len), self.prefix_len


@dataclass
class StaticRoute:
    destination: str | None  # network address, host bits zero
    dest_prefix_len: int | None
    via: str | None  # next-hop address or device name
    resolved_next_hop: str | None = None

    def is_complete(self) -> bool:
        return self.destination is not None and self.via is not None

    def destination_text(self) -> str | None:
        if self.destination is None:
            return None
        return f"{self.destination}/{self.dest_prefix_len}"


@dataclass(frozen=True, order=True)
class Endpoint:
    device: str
    interface: str


@dataclass
class Connection:
    endpoint_a: Endpoint
    endpoint_b: Endpoint
    network_id: int

    def canonicalized(self) -> "Connection":
        a, b = sorted((self.endpoint_a, self.endpoint_b))
        return Connection(endpoint_a=a, endpoint_b=b, network_id=self.network_id)

    def devices(self) -> tuple[str, str]:
        return self.endpoint_a.device, self.endpoint_b.device


@dataclass
class DeviceSpec:
    hostname: str
    node_type: str = "router"
    interfaces: list[InterfaceSpec] = field(default_factory=list)
    static_routes: list[StaticRoute] = field(default_factory=list)
    # True when no explicit type declaration was seen; kept out of the
    # serialized form so it cannot leak into canonical comparisons.
    type_defaulted: bool = field(default=False, compare=False)

    def interface(self, name: str) -> InterfaceSpec | None:
        for iface in self.interfaces:
            if iface.name == name:
                return iface
        return None

    def subnets(self) -> list[tuple[int, int]]:
        return [iface.subnet() for iface in self.interfaces]


@dataclass
class TopologyDocument:
    devices: list[DeviceSpec] = field(default_factory=list)
    connections: list[Connection] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list, compare=False)

    def device(self, hostname: str) -> DeviceSpec | None:
        for dev in self.devices:
            if dev.hostname == hostname:
                return dev
        return None

    def canonical(self) -> "TopologyDocument":
        """Deterministically ordered copy (warnings carried over as-is)."""
        devices = []
        for dev in sorted(self.devices, key=lambda d: d.hostname):
            devices.append(
                DeviceSpec(
                    hostname=dev.hostname,
                    node_type=dev.node_type,
                    interfaces=sorted(dev.interfaces, key=lambda i: i.name),
                    static_routes=sorted(
                        dev.static_routes,
                        key=lambda r: (
                            r.destination or "",
                            r.dest_prefix_len or 0,
                            r.via or "",
                        ),
                    ),
                    type_defaulted=dev.type_defaulted,
                )
            )
        connections = sorted(
            (conn.canonicalized() for conn in self.connections),
            key=lambda c: (c.endpoint_a, c.endpoint_b),
        )
        return TopologyDocument(
            devices=devices, connections=connections, warnings=list(self.warnings)
        )

    def to_dict(self) -> dict:
        doc = self.canonical()
        return {
            "schema": SCHEMA_VERSION,
            "devices": [_device_to_dict(dev) for dev in doc.devices],
            "connections": [
                {
                    "endpoint_a": {
                        "device": conn.endpoint_a.device,
                        "interface": conn.endpoint_a.interface,
                    },
                    "endpoint_b": {
                        "device": conn.endpoint_b.device,
                        "interface": conn.endpoint_b.interface,
                    },
                    "network_id": conn.network_id,
                }
                for conn in doc.connections
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _device_to_dict(dev: DeviceSpec) -> dict:
    return {
        "hostname": dev.hostname,
        "node_type": dev.node_type,
        "node_configs": {
            "basic": {
                "hostname": dev.hostname,
                "interfaces": [
                    {
                        "name": iface.name,
                        "ipv4": iface.ipv4,
                        "prefix_len": iface.prefix_len,
                        "network_id": iface.network_id,
                        "is_loopback": iface.is_loopback,
                    }
                    for iface in dev.interfaces
                ],
            },
            "L3": {
                "static_routes": [
                    {
                        "destination": route.destination_text(),
                        "via": route.via,
                        "resolved_next_hop": route.resolved_next_hop,
                    }
                    for route in dev.static_routes
                ],
            },
        },
    }


class SchemaError(ValueError):
    pass


def from_dict(data: dict) -> TopologyDocument:
    """Rebuild a document from its serialized form."""
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema {schema!r}, expected {SCHEMA_VERSION!r}")
    devices = []
    for dev_data in data.get("devices", []):
        basic = dev_data["node_configs"]["basic"]
        l3 = dev_data["node_configs"]["L3"]
        interfaces = [
            InterfaceSpec(
                name=if_data["name"],
                ipv4=if_data["ipv4"],
                prefix_len=if_data["prefix_len"],
                network_id=if_data.get("network_id"),
            )
            for if_data in basic["interfaces"]
        ]
        routes = []
        for route_data in l3["static_routes"]:
            dest = route_data.get("destination")
            if dest is not None:
                addr, _, plen = dest.partition("/")
                routes.append(
                    StaticRoute(
                        destination=addr,
                        dest_prefix_len=int(plen),
                        via=route_data.get("via"),
                        resolved_next_hop=route_data.get("resolved_next_hop"),
                    )
                )
            else:
                routes.append(
                    StaticRoute(
                        destination=None,
                        dest_prefix_len=None,
                        via=route_data.get("via"),
                        resolved_next_hop=route_data.get("resolved_next_hop"),
                    )
                )
        devices.append(
            DeviceSpec(
                hostname=dev_data["hostname"],
                node_type=dev_data["node_type"],
                interfaces=interfaces,
                static_routes=routes,
            )
        )
    connections = [
        Connection(
            endpoint_a=Endpoint(
                device=conn["endpoint_a"]["device"],
                interface=conn["endpoint_a"]["interface"],
            ),
            endpoint_b=Endpoint(
                device=conn["endpoint_b"]["device"],
                interface=conn["endpoint_b"]["interface"],
            ),
            network_id=conn["network_id"],
        )
        for conn in data.get("connections", [])
    ]
    return TopologyDocument(devices=devices, connections=connections)


def from_json(text: str) -> TopologyDocument:
    return from_dict(json.loads(text))
