"""Emulator provisioning client.

Builds a deterministic call plan from a validated topology (login, lab,
nodes, networks, links, starts, config pushes), executes it over HTTP
with session-cookie handling and bounded retries, and can read the
emulator state back into a topology document for verification.

Credentials: username comes from the session config, the password only
ever from the T2N_EVE_PASSWORD environment variable. Neither the password
nor cookies are written to logs or reports.
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field

import requests

from .. import ip
from ..extractor import mask_to_prefix
from ..topology import (
    Connection,
    DeviceSpec,
    Endpoint,
    InterfaceSpec,
    StaticRoute,
    TopologyDocument,
)
from . import wire

PASSWORD_ENV = "T2N_EVE_PASSWORD"

log = logging.getLogger("text2net.eve")


class EveError(Exception):
    pass


class MissingTemplate(EveError):
    pass


class AuthFailure(EveError):
    pass


class ApiError(EveError):
    def __init__(self, status: int, body: str) -> None:
        super().__init__(f"API error {status}: {body[:200]}")
        self.status = status
        self.body = body


class UnresolvedRoute(EveError):
    pass


class PlanAborted(EveError):
    def __init__(self, message: str, report: "ProvisionReport") -> None:
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class NodeTemplate:
    template: str
    image: str
    cpu: int
    ram_mb: int
    ethernet: int
    options: dict = field(default_factory=dict)


DEFAULT_TEMPLATES: dict[str, NodeTemplate] = {
    "router": NodeTemplate("vios", "vios-adventerprisek9-m", 1, 1024, 4),
    "switch": NodeTemplate("viosl2", "vios_l2-adventerprisek9-m", 1, 1024, 8),
    "pc": NodeTemplate("vpcs", "vpcs", 1, 256, 1),
}


@dataclass
class PlannedCall:
    kind: str  # login | create_lab | create_node | create_network | link | start | push_config
    hostname: str | None = None
    network_id: int | None = None
    payload: dict | None = None
    idempotent: bool = False

    def label(self) -> str:
        target = self.hostname or (
            f"net{self.network_id}" if self.network_id is not None else ""
        )
        return f"{self.kind}:{target}" if target else self.kind


@dataclass
class ProvisionPlan:
    lab_name: str
    calls: list[PlannedCall] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for call in self.calls:
            out[call.kind] = out.get(call.kind, 0) + 1
        return out


@dataclass
class EveSession:
    base_url: str
    username: str = "admin"
    lab_name: str = "t2n-lab"
    session_cookie: str | None = None
    node_id_map: dict[str, int] = field(default_factory=dict)
    net_id_map: dict[int, int] = field(default_factory=dict)
    timeout: float = 10.0


@dataclass
class ProvisionReport:
    completed: list[str] = field(default_factory=list)
    failed: list[dict] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    node_id_map: dict[str, int] = field(default_factory=dict)
    net_id_map: dict[int, int] = field(default_factory=dict)
    relogins: int = 0

    def to_dict(self) -> dict:
        return {
            "completed": self.completed,
            "failed": self.failed,
            "skipped": self.skipped,
            "node_id_map": self.node_id_map,
            "net_id_map": {str(k): v for k, v in self.net_id_map.items()},
            "relogins": self.relogins,
        }


def non_loopback_interfaces(device: DeviceSpec) -> list[InterfaceSpec]:
    """Link-capable interfaces in their stable index order."""
    return sorted(
        (i for i in device.interfaces if not i.is_loopback), key=lambda i: i.name
    )


def interface_index(device: DeviceSpec, if_name: str) -> int:
    for idx, iface in enumerate(non_loopback_interfaces(device)):
        if iface.name == if_name:
            return idx
    raise EveError(f"{device.hostname} has no link interface {if_name}")


def render_device_config(device: DeviceSpec) -> str:
    """Vendor-style configuration text pushed to a node."""
    lines = [f"hostname {device.hostname}", "!"]
    for iface in sorted(device.interfaces, key=lambda i: i.name):
        lines.append(f"interface {iface.name}")
        lines.append(f" ip address {iface.ipv4} {ip.prefix_to_mask(iface.prefix_len)}")
        lines.append(" no shutdown")
        lines.append("!")
    for route in sorted(
        device.static_routes,
        key=lambda r: (r.destination or "", r.dest_prefix_len or 0),
    ):
        if route.resolved_next_hop is None:
            raise UnresolvedRoute(
                f"{device.hostname}: route to {route.destination_text()} is unresolved"
            )
        lines.append(
            "ip route "
            f"{route.destination} {ip.prefix_to_mask(route.dest_prefix_len)}"
            f" {route.resolved_next_hop}"
        )
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_device_config(text: str, node_type: str = "router") -> DeviceSpec:
    """Inverse of render_device_config (used when reading emulator state)."""
    hostname = ""
    interfaces: list[InterfaceSpec] = []
    routes: list[StaticRoute] = []
    current: str | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("hostname "):
            hostname = line.split(None, 1)[1]
        elif line.startswith("interface "):
            current = line.split(None, 1)[1]
        elif line.startswith("ip address ") and current is not None:
            _, _, addr, mask = line.split()
            interfaces.append(
                InterfaceSpec(name=current, ipv4=addr, prefix_len=mask_to_prefix(mask))
            )
            current = None
        elif line.startswith("ip route "):
            _, _, dest, mask, next_hop = line.split()
            routes.append(
                StaticRoute(
                    destination=dest,
                    dest_prefix_len=mask_to_prefix(mask),
                    via=next_hop,
                    resolved_next_hop=next_hop,
                )
            )
    return DeviceSpec(
        hostname=hostname, node_type=node_type, interfaces=interfaces, static_routes=routes
    )


def provisioning_form(topo: TopologyDocument) -> TopologyDocument:
    """Canonical form actually shipped to an emulator.

    Device-name route targets are a convenience of the document layer; on
    the wire every route is expressed by its resolved next-hop address, so
    read-back comparisons use this form.
    """
    doc = topo.canonical()
    for device in doc.devices:
        for route in device.static_routes:
            if route.resolved_next_hop is None:
                raise UnresolvedRoute(
                    f"{device.hostname}: route to {route.destination_text()} is unresolved"
                )
            route.via = route.resolved_next_hop
    return doc.canonical()


def plan(
    topo: TopologyDocument,
    templates: dict[str, NodeTemplate] | None = None,
    lab_name: str = "t2n-lab",
) -> ProvisionPlan:
    """Deterministic provisioning plan for a validated topology.

    Ordering: login, lab, all nodes, all networks, all links, all starts,
    all config pushes.
    """
    templates = templates or DEFAULT_TEMPLATES
    doc = topo.canonical()
    for device in doc.devices:
        if device.node_type not in templates:
            raise MissingTemplate(f"no emulator template for node type {device.node_type!r}")

    result = ProvisionPlan(lab_name=lab_name)
    result.calls.append(PlannedCall(kind="login", idempotent=True))
    result.calls.append(PlannedCall(kind="create_lab", payload={"name": lab_name}))

    for device in doc.devices:
        tpl = templates[device.node_type]
        result.calls.append(
            PlannedCall(
                kind="create_node",
                hostname=device.hostname,
                payload={
                    "name": device.hostname,
                    "template": tpl.template,
                    "image": tpl.image,
                    "cpu": tpl.cpu,
                    "ram": tpl.ram_mb,
                    "ethernet": tpl.ethernet,
                    **tpl.options,
                },
            )
        )
    for conn in sorted(doc.connections, key=lambda c: c.network_id):
        result.calls.append(
            PlannedCall(
                kind="create_network",
                network_id=conn.network_id,
                payload={"name": f"net{conn.network_id}", "type": "bridge"},
            )
        )
    for conn in sorted(doc.connections, key=lambda c: c.network_id):
        for endpoint in (conn.endpoint_a, conn.endpoint_b):
            device = doc.device(endpoint.device)
            result.calls.append(
                PlannedCall(
                    kind="link",
                    hostname=endpoint.device,
                    network_id=conn.network_id,
                    payload={str(interface_index(device, endpoint.interface)): None},
                    idempotent=True,
                )
            )
    for device in doc.devices:
        result.calls.append(
            PlannedCall(kind="start", hostname=device.hostname, idempotent=True)
        )
    for device in doc.devices:
        result.calls.append(
            PlannedCall(
                kind="push_config",
                hostname=device.hostname,
                payload={"data": render_device_config(device)},
                idempotent=True,
            )
        )
    return result


def _login(session: EveSession) -> None:
    method, template = wire.LOGIN
    url = session.base_url + template
    response = requests.request(
        method,
        url,
        json={"username": session.username, "password": os.environ.get(PASSWORD_ENV, "")},
        timeout=session.timeout,
    )
    if response.status_code in (401, 403):
        raise AuthFailure("emulator rejected credentials")
    if response.status_code >= 400:
        raise ApiError(response.status_code, response.text)
    cookie = response.cookies.get("unetlab_session")
    if not cookie:
        raise ApiError(response.status_code, "login response carried no session cookie")
    session.session_cookie = cookie
    log.info("logged in to %s as %s", session.base_url, session.username)


def _request(session: EveSession, method: str, path: str, payload: dict | None):
    headers = {}
    if session.session_cookie:
        headers["Cookie"] = f"unetlab_session={session.session_cookie}"
    return requests.request(
        method,
        session.base_url + path,
        json=payload,
        headers=headers,
        timeout=session.timeout,
    )


def _call_route(session: EveSession, call: PlannedCall, plan_: ProvisionPlan):
    lab = plan_.lab_name
    if call.kind == "create_lab":
        method, template = wire.CREATE_LAB
        return method, wire.path(template), call.payload
    if call.kind == "create_node":
        method, template = wire.CREATE_NODE
        return method, wire.path(template, lab=lab), call.payload
    if call.kind == "create_network":
        method, template = wire.CREATE_NETWORK
        return method, wire.path(template, lab=lab), call.payload
    if call.kind == "link":
        method, template = wire.LINK
        node_id = session.node_id_map[call.hostname]
        net_id = session.net_id_map[call.network_id]
        payload = {index: net_id for index in call.payload}
        return method, wire.path(template, lab=lab, node_id=node_id), payload
    if call.kind == "start":
        method, template = wire.START_NODE
        node_id = session.node_id_map[call.hostname]
        return method, wire.path(template, lab=lab, node_id=node_id), None
    if call.kind == "push_config":
        method, template = wire.PUSH_CONFIG
        node_id = session.node_id_map[call.hostname]
        return method, wire.path(template, lab=lab, node_id=node_id), call.payload
    raise EveError(f"unknown call kind {call.kind!r}")


def execute(plan_: ProvisionPlan, session: EveSession) -> ProvisionReport:
    """Run the plan in order against the emulator.

    Idempotent calls get up to 2 retries on 5xx or connection trouble; a
    401 mid-plan triggers exactly one transparent re-login per call. Any
    unrecoverable failure aborts the remaining plan and raises PlanAborted
    carrying the partial report.
    """
    report = ProvisionReport()
    for position, call in enumerate(plan_.calls):
        try:
            _execute_call(session, call, plan_, report)
        except (AuthFailure, ApiError, requests.RequestException) as exc:
            report.failed.append({"call": call.label(), "error": str(exc)})
            report.skipped.extend(c.label() for c in plan_.calls[position + 1:])
            report.node_id_map = dict(session.node_id_map)
            report.net_id_map = dict(session.net_id_map)
            raise PlanAborted(f"{call.label()} failed: {exc}", report) from exc
        report.completed.append(call.label())
    report.node_id_map = dict(session.node_id_map)
    report.net_id_map = dict(session.net_id_map)
    return report


def _execute_call(
    session: EveSession, call: PlannedCall, plan_: ProvisionPlan, report: ProvisionReport
) -> None:
    if call.kind == "login":
        _login(session)
        return

    attempts = 3 if call.idempotent else 1
    relogged = False
    last: Exception | None = None
    for attempt in range(attempts):
        if attempt:
            time.sleep(0.05 * attempt)
        method, path, payload = _call_route(session, call, plan_)
        try:
            response = _request(session, method, path, payload)
        except requests.RequestException as exc:
            last = exc
            log.warning("%s %s raised %s", method, path, exc)
            continue
        if response.status_code == 401 and not relogged:
            log.info("session expired during %s; re-logging in", call.label())
            _login(session)
            report.relogins += 1
            relogged = True
            method, path, payload = _call_route(session, call, plan_)
            response = _request(session, method, path, payload)
        log.info("%s %s -> %d", method, path, response.status_code)
        if response.status_code in (401, 403):
            raise AuthFailure(f"{call.label()}: not authenticated")
        if response.status_code >= 500:
            last = ApiError(response.status_code, response.text)
            continue
        if response.status_code >= 400:
            raise ApiError(response.status_code, response.text)
        _record_ids(session, call, response)
        return
    raise last  # type: ignore[misc]


def _record_ids(session: EveSession, call: PlannedCall, response) -> None:
    if call.kind == "create_node":
        session.node_id_map[call.hostname] = int(response.json()["data"]["id"])
    elif call.kind == "create_network":
        session.net_id_map[call.network_id] = int(response.json()["data"]["id"])


def read_back(
    session: EveSession, templates: dict[str, NodeTemplate] | None = None
) -> TopologyDocument:
    """Reconstruct a topology document from live emulator state."""
    templates = templates or DEFAULT_TEMPLATES
    template_to_type = {tpl.template: node_type for node_type, tpl in templates.items()}
    lab = session.lab_name

    method, path_t = wire.LIST_NODES
    response = _request(session, method, wire.path(path_t, lab=lab), None)
    if response.status_code >= 400:
        raise ApiError(response.status_code, response.text)
    nodes = response.json()["data"]

    method, path_t = wire.LIST_NETWORKS
    response = _request(session, method, wire.path(path_t, lab=lab), None)
    if response.status_code >= 400:
        raise ApiError(response.status_code, response.text)
    networks = response.json()["data"]

    net_id_by_emulator_id: dict[int, int] = {}
    for emulator_id, net in networks.items():
        match = re.fullmatch(r"net(\d+)", net["name"])
        if match:
            net_id_by_emulator_id[int(emulator_id)] = int(match.group(1))

    devices: list[DeviceSpec] = []
    members: dict[int, list[Endpoint]] = {}
    for emulator_id, node in nodes.items():
        method, path_t = wire.GET_CONFIG
        response = _request(
            session, method, wire.path(path_t, lab=lab, node_id=emulator_id), None
        )
        if response.status_code >= 400:
            raise ApiError(response.status_code, response.text)
        config_text = response.json()["data"]
        node_type = template_to_type.get(node.get("template"), "router")
        device = parse_device_config(config_text, node_type=node_type)
        link_ifaces = non_loopback_interfaces(device)
        for index_text, emulator_net in (node.get("interfaces") or {}).items():
            network_id = net_id_by_emulator_id.get(int(emulator_net))
            if network_id is None:
                continue
            iface = link_ifaces[int(index_text)]
            iface.network_id = network_id
            members.setdefault(network_id, []).append(
                Endpoint(device=device.hostname, interface=iface.name)
            )
        devices.append(device)

    connections = [
        Connection(endpoint_a=pair[0], endpoint_b=pair[1], network_id=network_id)
        for network_id, pair in members.items()
        if len(pair) == 2
    ]
    return TopologyDocument(devices=devices, connections=connections).canonical()
