"""Turn a parsed SCS document into a structured topology document.

Device sections (keys without a comma) become DeviceSpec entries; comma
keys become point-to-point connections. Each distinct unordered endpoint
pair is assigned a dense network id, which is stamped on the connection
and on both participating interfaces.

Extraction is structural plus light normalization (interface families,
subnet masks). Semantic judgement (octet ranges, adjacency, host bits)
belongs to the validator.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field

from . import ip, scs
from .scs import LineKind, SCSDocument
from .topology import (
    Connection,
    DeviceSpec,
    Endpoint,
    InterfaceSpec,
    StaticRoute,
    TopologyDocument,
)


class ExtractionError(ValueError):
    """Base class for extraction failures."""


class DanglingConnection(ExtractionError):
    pass


class DuplicateHostname(ExtractionError):
    pass


class DuplicateInterface(ExtractionError):
    pass


class UnknownLine(ExtractionError):
    def __init__(self, key: str, line: str) -> None:
        super().__init__(f"unrecognized statement under {key!r}: {line!r}")
        self.key = key
        self.line = line


class UnrecognizedInterfaceFamily(ExtractionError):
    pass


class NonContiguousMask(ExtractionError):
    pass


class NoSharedSubnet(ExtractionError):
    pass


class NextHopNotConnected(ExtractionError):
    pass


class IncompleteRoute(ExtractionError):
    pass


_IFACE_NAME_RE = re.compile(r"^\s*(?P<family>[A-Za-z][A-Za-z ]*?)\s*(?P<suffix>\d[\d/ ]*)\s*$")

_IFACE_FAMILIES = {
    "gi": "GigabitEthernet",
    "gig": "GigabitEthernet",
    "gigabitethernet": "GigabitEthernet",
    "fa": "FastEthernet",
    "fastethernet": "FastEthernet",
    "lo": "Loopback",
    "loopback": "Loopback",
}

_DOTTED_QUAD_RE = re.compile(r"^\d+(?:\.\d+){3}$")


def normalize_interface_name(raw: str) -> str:
    """Canonicalize interface spellings: "gi 0/0" -> "GigabitEthernet0/0".

    Raises UnrecognizedInterfaceFamily for families outside the supported
    set (GigabitEthernet, FastEthernet, Loopback).
    """
    match = _IFACE_NAME_RE.match(raw)
    if not match:
        raise UnrecognizedInterfaceFamily(f"cannot parse interface name {raw!r}")
    family = match.group("family").replace(" ", "").lower()
    canonical = _IFACE_FAMILIES.get(family)
    if canonical is None:
        raise UnrecognizedInterfaceFamily(f"unknown interface family in {raw!r}")
    suffix = match.group("suffix").replace(" ", "")
    return canonical + suffix


def mask_to_prefix(mask: str) -> int:
    """Convert a dotted-quad netmask to a prefix length.

    Raises NonContiguousMask when the set bits are not a single leading
    run (e.g. 255.0.255.0).
    """
    value = ip.parse_ipv4(mask)
    ones = bin(value).count("1")
    if value != ip.prefix_to_mask_int(ones):
        raise NonContiguousMask(f"mask {mask} is not contiguous")
    return ones


def prefix_to_mask(prefix_len: int) -> str:
    return ip.prefix_to_mask(prefix_len)


@dataclass
class NetworkIdAllocator:
    """Dense 1..N ids keyed by unordered endpoint pair."""

    counter: int = 1
    assigned: dict[frozenset[Endpoint], int] = field(default_factory=dict)

    def assign(self, a: Endpoint, b: Endpoint) -> int:
        pair = frozenset((a, b))
        if pair not in self.assigned:
            self.assigned[pair] = self.counter
            self.counter += 1
        return self.assigned[pair]


def extract_topology(doc: SCSDocument, strict: bool = False) -> TopologyDocument:
    """Build a TopologyDocument from an SCS document.

    Deterministic given input order: devices keep first-appearance order,
    connections get ids in first-assignment order. In lenient mode (the
    default) unknown statements become warnings; strict mode raises.
    """
    topo = TopologyDocument()
    hostname_by_key: dict[str, str] = {}

    for key in doc.device_keys():
        device = _extract_device(key, doc.lines_for(key), strict, topo.warnings)
        if topo.device(device.hostname) is not None:
            raise DuplicateHostname(f"hostname {device.hostname!r} declared twice")
        hostname_by_key[key] = device.hostname
        topo.devices.append(device)

    allocator = NetworkIdAllocator()
    seen_pairs: set[frozenset[Endpoint]] = set()
    for key in doc.connection_keys():
        for line in doc.lines_for(key):
            classified = scs.classify_line(line)
            if classified.kind is not LineKind.CONNECTION_DECL:
                if strict:
                    raise UnknownLine(key, line)
                topo.warnings.append(f"ignoring non-connection statement under {key!r}: {line}")
                continue
            conn = _extract_connection(key, line, hostname_by_key, topo)
            pair = frozenset((conn.endpoint_a, conn.endpoint_b))
            conn.network_id = allocator.assign(conn.endpoint_a, conn.endpoint_b)
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            for endpoint in (conn.endpoint_a, conn.endpoint_b):
                iface = topo.device(endpoint.device).interface(endpoint.interface)
                if iface.network_id is not None and iface.network_id != conn.network_id:
                    raise DanglingConnection(
                        f"interface {endpoint.device}.{endpoint.interface} is already"
                        f" part of network {iface.network_id}"
                    )
                iface.network_id = conn.network_id
            topo.connections.append(conn)

    return topo


def _extract_device(
    key: str, lines: list[str], strict: bool, warnings: list[str]
) -> DeviceSpec:
    node_type: str | None = None
    name_override: str | None = None
    interfaces: list[InterfaceSpec] = []
    routes: list[StaticRoute] = []

    for line in lines:
        classified = scs.classify_line(line)
        kind = classified.kind
        if kind is LineKind.TYPE_DECL:
            node_type = scs.match_type(line).group("type").lower()
        elif kind is LineKind.NAME_DECL:
            name_override = scs.match_name(line).group("name")
        elif kind is LineKind.INTERFACE_DECL:
            match = scs.match_interface(line)
            name = normalize_interface_name(match.group("name"))
            if any(iface.name == name for iface in interfaces):
                raise DuplicateInterface(f"{key}: interface {name} declared twice")
            if match.group("plen") is not None:
                prefix_len = int(match.group("plen"))
            else:
                prefix_len = mask_to_prefix(match.group("mask"))
            interfaces.append(
                InterfaceSpec(name=name, ipv4=match.group("addr"), prefix_len=prefix_len)
            )
        elif kind is LineKind.STATIC_ROUTE_DECL:
            match = scs.match_static_route(line)
            dest = match.group("dest")
            plen = match.group("plen")
            routes.append(
                StaticRoute(
                    destination=dest,
                    dest_prefix_len=int(plen) if plen is not None else None,
                    via=match.group("via"),
                )
            )
        else:
            if strict:
                raise UnknownLine(key, line)
            warnings.append(f"ignoring unrecognized statement under {key!r}: {line}")

    hostname = name_override or key
    if node_type is None:
        node_type = "router"
        warnings.append(f"device {hostname!r} has no type declaration, defaulted to router")
        defaulted = True
    else:
        defaulted = False
    return DeviceSpec(
        hostname=hostname,
        node_type=node_type,
        interfaces=interfaces,
        static_routes=routes,
        type_defaulted=defaulted,
    )


def _extract_connection(
    key: str,
    line: str,
    hostname_by_key: dict[str, str],
    topo: TopologyDocument,
) -> Connection:
    match = scs.match_connection(line)
    key_devices = {hostname_by_key.get(part, part) for part in key.split(",")}
    endpoints = []
    for dev_group, if_group in (("dev_a", "if_a"), ("dev_b", "if_b")):
        dev_name = match.group(dev_group)
        dev_name = hostname_by_key.get(dev_name, dev_name)
        device = topo.device(dev_name)
        if device is None:
            raise DanglingConnection(f"connection {key!r} references unknown device {dev_name!r}")
        if_name = normalize_interface_name(match.group(if_group))
        iface = device.interface(if_name)
        if iface is None:
            raise DanglingConnection(
                f"connection {key!r} references undeclared interface {dev_name}.{if_name}"
            )
        if iface.is_loopback:
            raise DanglingConnection(
                f"connection {key!r} references loopback {dev_name}.{if_name};"
                " loopbacks are internal networks"
            )
        endpoints.append(Endpoint(device=dev_name, interface=if_name))
    if {e.device for e in endpoints} != key_devices:
        raise DanglingConnection(
            f"connection line devices {sorted(e.device for e in endpoints)}"
            f" do not match key {key!r}"
        )
    if endpoints[0] == endpoints[1]:
        raise DanglingConnection(f"connection {key!r} joins an interface to itself")
    conn = Connection(endpoint_a=endpoints[0], endpoint_b=endpoints[1], network_id=0)
    return conn.canonicalized()


def resolve_static_route(
    route: StaticRoute,
    owner: DeviceSpec,
    topo: TopologyDocument,
    warnings: list[str] | None = None,
) -> StaticRoute:
    """Fill in resolved_next_hop for one route.

    A via-device is resolved to its address on the lowest-numbered subnet
    shared with the owner; an explicit via-address must lie in one of the
    owner's connected subnets. Ambiguity notes go to ``warnings`` when a
    sink is supplied.
    """
    if not route.is_complete():
        raise IncompleteRoute(f"route on {owner.hostname} is missing destination or via")

    if _DOTTED_QUAD_RE.match(route.via):
        via_addr = ip.parse_ipv4(route.via)
        for iface in owner.interfaces:
            if iface.is_loopback:
                continue
            network, plen = iface.subnet()
            if ip.in_network(via_addr, network, plen):
                return StaticRoute(
                    destination=route.destination,
                    dest_prefix_len=route.dest_prefix_len,
                    via=route.via,
                    resolved_next_hop=route.via,
                )
        raise NextHopNotConnected(
            f"{owner.hostname}: next hop {route.via} is not on a connected subnet"
        )

    via_device = topo.device(route.via)
    if via_device is None:
        raise NoSharedSubnet(
            f"{owner.hostname}: via device {route.via!r} is not in the topology"
        )
    candidates: list[tuple[int, str]] = []
    for own_iface in owner.interfaces:
        if own_iface.is_loopback:
            continue
        own_net = own_iface.subnet()
        for via_iface in via_device.interfaces:
            if via_iface.is_loopback:
                continue
            if via_iface.subnet() == own_net:
                candidates.append((via_iface.network_id or 0, via_iface.ipv4))
    if not candidates:
        raise NoSharedSubnet(
            f"{owner.hostname}: no shared subnet with via device {route.via!r}"
        )
    candidates.sort()
    if len(candidates) > 1 and warnings is not None:
        warnings.append(
            f"{owner.hostname}: multiple shared subnets with {route.via};"
            f" picked network {candidates[0][0]}"
        )
    return StaticRoute(
        destination=route.destination,
        dest_prefix_len=route.dest_prefix_len,
        via=route.via,
        resolved_next_hop=candidates[0][1],
    )


def resolve_routes(topo: TopologyDocument) -> TopologyDocument:
    """Copy of the topology with every static route resolved."""
    resolved = copy.deepcopy(topo)
    for device in resolved.devices:
        device.static_routes = [
            resolve_static_route(route, device, resolved, resolved.warnings)
            for route in device.static_routes
        ]
    return resolved
