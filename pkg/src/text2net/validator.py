"""Semantic validation of topologies and the clarification requests it drives.

Every problem is reported as a Finding with a code from the registry
below; nothing raises during validation. Errors make the topology
Invalid, MissingInfo findings (with no errors present) make it
NeedsClarification, which feeds the dialog loop.

Finding code registry:

    IP_MALFORMED                Error       not a plain dotted quad
    IP_OCTET_RANGE              Error       octet outside 0-255
    PREFIX_RANGE                Error       prefix length outside 0-32
    DUPLICATE_ADDRESS           Error       same address twice in one subnet
    CONNECTION_ENDPOINT_MISSING Error       link references unknown device/interface
    ROUTE_NO_ADJACENCY          Error       via-device shares no subnet with owner
    ROUTE_NEXT_HOP_NOT_CONNECTED Error      via-address not on a connected subnet
    ROUTE_HOST_BITS             Error       route destination has host bits set
    ROUTE_MISSING_DETAILS       MissingInfo route lacks destination and/or via
    LINK_SUBNET_MISMATCH        Warning     link endpoints in different subnets
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from . import ip
from .extractor import NextHopNotConnected, NoSharedSubnet, resolve_static_route
from .prompts import clarification_template
from .topology import DeviceSpec, StaticRoute, TopologyDocument


class Severity(enum.Enum):
    ERROR = "Error"
    MISSING_INFO = "MissingInfo"
    WARNING = "Warning"


class Status(enum.Enum):
    VALID = "Valid"
    NEEDS_CLARIFICATION = "NeedsClarification"
    INVALID = "Invalid"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    subject: str
    message: str
    missing: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "subject": self.subject,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    status: Status
    findings: list[Finding] = field(default_factory=list)

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    def missing_info(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.MISSING_INFO]

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "findings": [f.to_dict() for f in self.findings],
        }


@dataclass
class ClarificationRequest:
    prompt: str
    missing_fields: list[tuple[str, str]]

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "missing_fields": [
                {"subject": subject, "field": fieldname}
                for subject, fieldname in self.missing_fields
            ],
        }


class Ipv4Error(ValueError):
    def __init__(self, code: str, text: str) -> None:
        super().__init__(f"{code}: {text!r}")
        self.code = code
        self.text = text


class NotClarifiable(ValueError):
    pass


_QUAD_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)\.(\d+)$")


def validate_ipv4(text: str) -> int:
    """Strict dotted-quad parse returning the 32-bit value.

    Rejects anything but four plain decimal octets (no signs, no hex, no
    leading zeros) with IP_MALFORMED, and octets above 255 with
    IP_OCTET_RANGE.
    """
    match = _QUAD_RE.match(text)
    if not match:
        raise Ipv4Error("IP_MALFORMED", text)
    value = 0
    for part in match.groups():
        if len(part) > 1 and part.startswith("0"):
            raise Ipv4Error("IP_MALFORMED", text)
        octet = int(part)
        if octet > 255:
            raise Ipv4Error("IP_OCTET_RANGE", text)
        value = (value << 8) | octet
    return value


def validate_topology(topo: TopologyDocument) -> ValidationReport:
    """Run all semantic checks and fold the findings into a report."""
    findings: list[Finding] = []
    findings.extend(_check_addresses(topo))
    findings.extend(_check_prefixes(topo))
    findings.extend(_check_duplicate_addresses(topo))
    findings.extend(_check_links(topo))
    findings.extend(_check_routes(topo))

    if any(f.severity is Severity.ERROR for f in findings):
        status = Status.INVALID
    elif any(f.severity is Severity.MISSING_INFO for f in findings):
        status = Status.NEEDS_CLARIFICATION
    else:
        status = Status.VALID
    return ValidationReport(status=status, findings=findings)


def make_clarification(report: ValidationReport) -> ClarificationRequest:
    """Aggregate all MissingInfo findings into one user-facing request.

    Wording comes from the frozen prompt registry, one sentence per
    distinct finding code, so tests can assert exact strings.
    """
    if report.status is not Status.NEEDS_CLARIFICATION:
        raise NotClarifiable(f"report status is {report.status.value}")
    missing = report.missing_info()
    seen_codes: list[str] = []
    missing_fields: list[tuple[str, str]] = []
    for finding in missing:
        if finding.code not in seen_codes:
            seen_codes.append(finding.code)
        missing_fields.append((finding.subject, " and ".join(finding.missing) or "details"))
    prompt = " ".join(clarification_template(code) for code in seen_codes)
    return ClarificationRequest(prompt=prompt, missing_fields=missing_fields)


def _iface_subject(hostname: str, if_name: str) -> str:
    return f"device/{hostname}/interface/{if_name}"


def _route_subject(hostname: str, index: int) -> str:
    return f"device/{hostname}/static_route/{index}"


def _address_finding(addr: str, subject: str, what: str) -> Finding | None:
    try:
        validate_ipv4(addr)
    except Ipv4Error as exc:
        return Finding(
            severity=Severity.ERROR,
            code=exc.code,
            subject=subject,
            message=f"{what} {addr!r} is not a valid IPv4 address",
        )
    return None


def _check_addresses(topo: TopologyDocument) -> list[Finding]:
    findings = []
    for dev in topo.devices:
        for iface in dev.interfaces:
            bad = _address_finding(
                iface.ipv4, _iface_subject(dev.hostname, iface.name), "address"
            )
            if bad:
                findings.append(bad)
        for idx, route in enumerate(dev.static_routes):
            subject = _route_subject(dev.hostname, idx)
            if route.destination is not None:
                bad = _address_finding(route.destination, subject, "route destination")
                if bad:
                    findings.append(bad)
            if route.via is not None and _looks_like_address(route.via):
                bad = _address_finding(route.via, subject, "next hop")
                if bad:
                    findings.append(bad)
    return findings


def _looks_like_address(text: str) -> bool:
    return bool(re.match(r"^[\d.]+$", text))


def _check_prefixes(topo: TopologyDocument) -> list[Finding]:
    findings = []
    for dev in topo.devices:
        for iface in dev.interfaces:
            if not 0 <= iface.prefix_len <= 32:
                findings.append(
                    Finding(
                        severity=Severity.ERROR,
                        code="PREFIX_RANGE",
                        subject=_iface_subject(dev.hostname, iface.name),
                        message=f"prefix length /{iface.prefix_len} outside 0-32",
                    )
                )
        for idx, route in enumerate(dev.static_routes):
            plen = route.dest_prefix_len
            if plen is not None and not 0 <= plen <= 32:
                findings.append(
                    Finding(
                        severity=Severity.ERROR,
                        code="PREFIX_RANGE",
                        subject=_route_subject(dev.hostname, idx),
                        message=f"prefix length /{plen} outside 0-32",
                    )
                )
    return findings


def _check_duplicate_addresses(topo: TopologyDocument) -> list[Finding]:
    findings = []
    seen: dict[tuple[int, int, int], str] = {}
    for dev in topo.devices:
        for iface in dev.interfaces:
            try:
                addr = validate_ipv4(iface.ipv4)
            except Ipv4Error:
                continue
            if not 0 <= iface.prefix_len <= 32:
                continue
            key = (ip.network_int(addr, iface.prefix_len), iface.prefix_len, addr)
            subject = _iface_subject(dev.hostname, iface.name)
            if key in seen:
                findings.append(
                    Finding(
                        severity=Severity.ERROR,
                        code="DUPLICATE_ADDRESS",
                        subject=subject,
                        message=(
                            f"address {iface.ipv4}/{iface.prefix_len} already used"
                            f" by {seen[key]}"
                        ),
                    )
                )
            else:
                seen[key] = subject
    return findings


def _check_links(topo: TopologyDocument) -> list[Finding]:
    findings = []
    for conn in topo.connections:
        subject = f"connection/{conn.network_id}"
        ifaces = []
        for endpoint in (conn.endpoint_a, conn.endpoint_b):
            device = topo.device(endpoint.device)
            iface = device.interface(endpoint.interface) if device else None
            if iface is None:
                findings.append(
                    Finding(
                        severity=Severity.ERROR,
                        code="CONNECTION_ENDPOINT_MISSING",
                        subject=subject,
                        message=(
                            f"endpoint {endpoint.device}.{endpoint.interface}"
                            " does not exist"
                        ),
                    )
                )
            else:
                ifaces.append(iface)
        if len(ifaces) != 2:
            continue
        try:
            addr_a = validate_ipv4(ifaces[0].ipv4)
            addr_b = validate_ipv4(ifaces[1].ipv4)
        except Ipv4Error:
            continue
        if not (0 <= ifaces[0].prefix_len <= 32 and 0 <= ifaces[1].prefix_len <= 32):
            continue
        min_plen = min(ifaces[0].prefix_len, ifaces[1].prefix_len)
        if ip.network_int(addr_a, min_plen) != ip.network_int(addr_b, min_plen):
            findings.append(
                Finding(
                    severity=Severity.WARNING,
                    code="LINK_SUBNET_MISMATCH",
                    subject=subject,
                    message=(
                        f"{conn.endpoint_a.device}.{conn.endpoint_a.interface} and"
                        f" {conn.endpoint_b.device}.{conn.endpoint_b.interface}"
                        " are not in the same subnet"
                    ),
                )
            )
    return findings


def _check_routes(topo: TopologyDocument) -> list[Finding]:
    findings = []
    for dev in topo.devices:
        for idx, route in enumerate(dev.static_routes):
            subject = _route_subject(dev.hostname, idx)
            missing = []
            if route.destination is None:
                missing.append("destination")
            if route.via is None:
                missing.append("via")
            if missing:
                findings.append(
                    Finding(
                        severity=Severity.MISSING_INFO,
                        code="ROUTE_MISSING_DETAILS",
                        subject=subject,
                        message=(
                            f"static route on {dev.hostname} is missing "
                            + " and ".join(missing)
                        ),
                        missing=tuple(missing),
                    )
                )
                continue
            findings.extend(_check_complete_route(route, dev, topo, subject))
    return findings


def _check_complete_route(
    route: StaticRoute, dev: DeviceSpec, topo: TopologyDocument, subject: str
) -> list[Finding]:
    findings = []
    try:
        dest = validate_ipv4(route.destination)
    except Ipv4Error:
        return findings  # already reported by the address pass
    plen = route.dest_prefix_len
    if plen is None or not 0 <= plen <= 32:
        return findings
    if dest != ip.network_int(dest, plen):
        findings.append(
            Finding(
                severity=Severity.ERROR,
                code="ROUTE_HOST_BITS",
                subject=subject,
                message=(
                    f"destination {route.destination}/{plen} has host bits set;"
                    f" expected {ip.format_ipv4(ip.network_int(dest, plen))}/{plen}"
                ),
            )
        )
    try:
        resolve_static_route(route, dev, topo)
    except NoSharedSubnet as exc:
        findings.append(
            Finding(
                severity=Severity.ERROR,
                code="ROUTE_NO_ADJACENCY",
                subject=subject,
                message=str(exc),
            )
        )
    except NextHopNotConnected as exc:
        findings.append(
            Finding(
                severity=Severity.ERROR,
                code="ROUTE_NEXT_HOP_NOT_CONNECTED",
                subject=subject,
                message=str(exc),
            )
        )
    return findings
