"""In-memory Layer-3 simulator.

Instantiates a validated topology as nodes with routing tables (connected
plus static routes) and point-to-point links, then answers reachability
queries: hop-by-hop longest-prefix-match forwarding with a TTL guard, and
an echo reply simulated back to the probe source, so a ping only succeeds
when both directions deliver.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from . import ip
from .topology import TopologyDocument


class SimError(Exception):
    pass


class UnknownDevice(SimError):
    pass


class UnresolvedRoute(SimError):
    pass


class MultiAccessLinkUnsupported(SimError):
    pass


class RouteOrigin(enum.Enum):
    CONNECTED = "connected"
    STATIC = "static"


class FailureReason(enum.Enum):
    NO_ROUTE_FORWARD = "NoRouteForward"
    NO_ROUTE_REVERSE = "NoRouteReverse"
    TTL_EXCEEDED = "TtlExceeded"
    DESTINATION_UNKNOWN = "DestinationUnknown"


@dataclass(frozen=True)
class RibEntry:
    network: int
    prefix_len: int
    next_hop: int | None  # None for connected routes
    origin: RouteOrigin

    def covers(self, addr: int) -> bool:
        return ip.in_network(addr, self.network, self.prefix_len)

    def render(self) -> str:
        net = f"{ip.format_ipv4(self.network)}/{self.prefix_len}"
        if self.origin is RouteOrigin.CONNECTED:
            return f"{net} connected"
        return f"{net} static via {ip.format_ipv4(self.next_hop)}"


@dataclass
class SimInterface:
    name: str
    addr: int
    prefix_len: int
    up: bool = True

    @property
    def is_loopback(self) -> bool:
        return self.name.startswith("Loopback")

    def network(self) -> tuple[int, int]:
        return ip.network_int(self.addr, self.prefix_len), self.prefix_len


@dataclass
class SimNode:
    hostname: str
    interfaces: list[SimInterface] = field(default_factory=list)
    rib: list[RibEntry] = field(default_factory=list)

    def owns(self, addr: int) -> bool:
        return any(iface.addr == addr and iface.up for iface in self.interfaces)

    def interface(self, name: str) -> SimInterface | None:
        for iface in self.interfaces:
            if iface.name == name:
                return iface
        return None

    def lowest_loopback(self) -> SimInterface | None:
        loopbacks = [i for i in self.interfaces if i.is_loopback and i.up]
        if not loopbacks:
            return None
        return min(loopbacks, key=lambda i: _loopback_number(i.name))


def _loopback_number(name: str) -> int:
    match = re.search(r"(\d+)$", name)
    return int(match.group(1)) if match else 0


@dataclass
class PingResult:
    success: bool
    forward_path: list[str]
    reverse_path: list[str]
    failure_reason: FailureReason | None
    epoch: int

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "forward_path": self.forward_path,
            "reverse_path": self.reverse_path,
            "failure_reason": self.failure_reason.value if self.failure_reason else None,
            "epoch": self.epoch,
        }


class SimNetwork:
    """Nodes plus point-to-point links; mutations bump the epoch."""

    def __init__(self) -> None:
        self.nodes: dict[str, SimNode] = {}
        self.links: dict[int, set[tuple[str, str]]] = {}
        self.epoch = 1

    def node(self, hostname: str) -> SimNode:
        node = self.nodes.get(hostname)
        if node is None:
            raise UnknownDevice(hostname)
        return node

    def remove_static_route(self, hostname: str, destination: str, prefix_len: int) -> None:
        node = self.node(hostname)
        network = ip.network_int(ip.parse_ipv4(destination), prefix_len)
        before = len(node.rib)
        node.rib = [
            entry
            for entry in node.rib
            if not (
                entry.origin is RouteOrigin.STATIC
                and entry.network == network
                and entry.prefix_len == prefix_len
            )
        ]
        if len(node.rib) == before:
            raise SimError(f"{hostname} has no static route to {destination}/{prefix_len}")
        self.epoch += 1

    def link_peer(self, hostname: str, if_name: str) -> tuple[str, str] | None:
        for members in self.links.values():
            if (hostname, if_name) in members:
                for member in members:
                    if member != (hostname, if_name):
                        return member
        return None


def instantiate(topo: TopologyDocument) -> SimNetwork:
    """Build a SimNetwork from a validated topology with resolved routes."""
    net = SimNetwork()
    for dev in topo.devices:
        node = SimNode(hostname=dev.hostname)
        for iface in dev.interfaces:
            node.interfaces.append(
                SimInterface(
                    name=iface.name,
                    addr=ip.parse_ipv4(iface.ipv4),
                    prefix_len=iface.prefix_len,
                )
            )
        connected_seen: set[tuple[int, int]] = set()
        for sim_iface in node.interfaces:
            if not sim_iface.up:
                continue
            network = sim_iface.network()
            if network in connected_seen:
                continue
            connected_seen.add(network)
            node.rib.append(
                RibEntry(
                    network=network[0],
                    prefix_len=network[1],
                    next_hop=None,
                    origin=RouteOrigin.CONNECTED,
                )
            )
        static_seen: set[tuple[int, int, int]] = set()
        for route in dev.static_routes:
            if route.resolved_next_hop is None:
                raise UnresolvedRoute(
                    f"{dev.hostname}: static route to {route.destination_text()}"
                    " has no resolved next hop"
                )
            entry_key = (
                ip.network_int(ip.parse_ipv4(route.destination), route.dest_prefix_len),
                route.dest_prefix_len,
                ip.parse_ipv4(route.resolved_next_hop),
            )
            if entry_key in static_seen:
                continue
            static_seen.add(entry_key)
            node.rib.append(
                RibEntry(
                    network=entry_key[0],
                    prefix_len=entry_key[1],
                    next_hop=entry_key[2],
                    origin=RouteOrigin.STATIC,
                )
            )
        net.nodes[dev.hostname] = node

    for conn in topo.connections:
        members = net.links.setdefault(conn.network_id, set())
        members.add((conn.endpoint_a.device, conn.endpoint_a.interface))
        members.add((conn.endpoint_b.device, conn.endpoint_b.interface))
        if len(members) > 2:
            raise MultiAccessLinkUnsupported(
                f"network {conn.network_id} has {len(members)} endpoints"
            )
    return net


def longest_prefix_match(rib: list[RibEntry], dst: int) -> RibEntry | None:
    """Most specific covering route; connected beats static on equal length,
    then the lowest next hop wins."""
    candidates = [entry for entry in rib if entry.covers(dst)]
    if not candidates:
        return None
    return min(
        candidates,
        key=lambda e: (
            -e.prefix_len,
            0 if e.origin is RouteOrigin.CONNECTED else 1,
            e.next_hop if e.next_hop is not None else -1,
        ),
    )


class _Step(enum.Enum):
    DELIVERED = "delivered"
    FORWARDED = "forwarded"
    NO_ROUTE = "no_route"
    UNKNOWN_DEST = "unknown_dest"


def _forward_step(net: SimNetwork, node: SimNode, dst: int) -> tuple[_Step, SimNode | None]:
    if node.owns(dst):
        return _Step.DELIVERED, node
    entry = longest_prefix_match(node.rib, dst)
    if entry is None:
        return _Step.NO_ROUTE, None
    if entry.origin is RouteOrigin.CONNECTED:
        # On-link delivery: the covering subnet is local, so the target
        # must be a link peer's address.
        for iface in node.interfaces:
            if not iface.up or iface.network() != (entry.network, entry.prefix_len):
                continue
            peer = net.link_peer(node.hostname, iface.name)
            if peer is not None:
                peer_node = net.nodes[peer[0]]
                peer_iface = peer_node.interface(peer[1])
                if peer_iface is not None and peer_iface.addr == dst:
                    return _Step.FORWARDED, peer_node
        return _Step.UNKNOWN_DEST, None
    next_hop = entry.next_hop
    for iface in node.interfaces:
        if not iface.up or iface.is_loopback:
            continue
        network, plen = iface.network()
        if not ip.in_network(next_hop, network, plen):
            continue
        peer = net.link_peer(node.hostname, iface.name)
        if peer is not None:
            peer_node = net.nodes[peer[0]]
            peer_iface = peer_node.interface(peer[1])
            if peer_iface is not None and peer_iface.addr == next_hop:
                return _Step.FORWARDED, peer_node
    return _Step.NO_ROUTE, None


def _walk(net: SimNetwork, start: SimNode, dst: int, ttl: int) -> tuple[_Step, list[str]]:
    path = [start.hostname]
    node = start
    for _ in range(ttl):
        step, nxt = _forward_step(net, node, dst)
        if step is _Step.DELIVERED:
            return step, path
        if step in (_Step.NO_ROUTE, _Step.UNKNOWN_DEST):
            return step, path
        node = nxt
        path.append(node.hostname)
    return _Step.FORWARDED, path  # ttl ran out while still forwarding


def probe_source_address(net: SimNetwork, src: SimNode, dst: int) -> int:
    """Source address a probe from ``src`` would carry.

    The lowest-numbered loopback when one exists (internal networks are
    what the scenarios test), otherwise the egress interface address for
    the first hop, otherwise the first interface address.
    """
    loopback = src.lowest_loopback()
    if loopback is not None:
        return loopback.addr
    entry = longest_prefix_match(src.rib, dst)
    if entry is not None:
        target = entry.next_hop if entry.next_hop is not None else dst
        for iface in src.interfaces:
            if not iface.up or iface.is_loopback:
                continue
            network, plen = iface.network()
            if ip.in_network(target, network, plen):
                return iface.addr
    return src.interfaces[0].addr if src.interfaces else 0


def ping(net: SimNetwork, src: str, dst_addr: str, ttl: int = 64) -> PingResult:
    """Bidirectional reachability probe from ``src`` to ``dst_addr``."""
    src_node = net.node(src)
    dst = ip.parse_ipv4(dst_addr)
    probe_src = probe_source_address(net, src_node, dst)

    step, forward_path = _walk(net, src_node, dst, ttl)
    if step is not _Step.DELIVERED:
        reason = {
            _Step.NO_ROUTE: FailureReason.NO_ROUTE_FORWARD,
            _Step.UNKNOWN_DEST: FailureReason.DESTINATION_UNKNOWN,
            _Step.FORWARDED: FailureReason.TTL_EXCEEDED,
        }[step]
        return PingResult(False, forward_path, [], reason, net.epoch)

    owner = net.nodes[forward_path[-1]]
    step, reverse_path = _walk(net, owner, probe_src, ttl)
    if step is not _Step.DELIVERED:
        reason = (
            FailureReason.TTL_EXCEEDED
            if step is _Step.FORWARDED
            else FailureReason.NO_ROUTE_REVERSE
        )
        return PingResult(False, forward_path, reverse_path, reason, net.epoch)

    return PingResult(True, forward_path, reverse_path, None, net.epoch)


def show_config(net: SimNetwork, hostname: str) -> str:
    """Stable plain-text rendering of one node's configuration."""
    node = net.node(hostname)
    lines = [f"hostname {node.hostname}", "!"]
    for iface in sorted(node.interfaces, key=lambda i: i.name):
        mask = ip.prefix_to_mask(iface.prefix_len)
        lines.append(f"interface {iface.name} {ip.format_ipv4(iface.addr)} {mask}")
    lines.append("!")
    static = [e for e in node.rib if e.origin is RouteOrigin.STATIC]
    for entry in sorted(static, key=lambda e: (e.network, e.prefix_len, e.next_hop)):
        lines.append(
            "ip route "
            f"{ip.format_ipv4(entry.network)} {ip.prefix_to_mask(entry.prefix_len)}"
            f" {ip.format_ipv4(entry.next_hop)}"
        )
    return "\n".join(lines) + "\n"
