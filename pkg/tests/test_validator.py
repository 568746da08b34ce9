import pytest

from text2net import scs
from text2net.extractor import extract_topology
from text2net.topology import DeviceSpec, InterfaceSpec
from text2net.validator import (
    ClarificationRequest,
    Ipv4Error,
    NotClarifiable,
    Severity,
    Status,
    make_clarification,
    validate_ipv4,
    validate_topology,
)


def _topo(text):
    return extract_topology(scs.parse_scs(text))


def test_validate_ipv4_values():
    assert validate_ipv4("0.0.0.0") == 0x00000000
    assert validate_ipv4("192.168.100.2") == 0xC0A86402
    assert validate_ipv4("255.255.255.255") == 0xFFFFFFFF


@pytest.mark.parametrize(
    "text,code",
    [
        ("192.168.0.300", "IP_OCTET_RANGE"),
        ("256.0.0.1", "IP_OCTET_RANGE"),
        ("1000.1.1.1", "IP_OCTET_RANGE"),
        ("192.168.0", "IP_MALFORMED"),
        ("192.168.0.1.5", "IP_MALFORMED"),
        ("192.168.0.010", "IP_MALFORMED"),
        ("+1.2.3.4", "IP_MALFORMED"),
        ("0x10.2.3.4", "IP_MALFORMED"),
        ("a.b.c.d", "IP_MALFORMED"),
        ("", "IP_MALFORMED"),
    ],
)
def test_validate_ipv4_errors(text, code):
    with pytest.raises(Ipv4Error) as err:
        validate_ipv4(text)
    assert err.value.code == code


def test_validate_ipv4_against_brute_force_oracle():
    """Exhaustive agreement over octets {0, 1, 99, 255, 256, 300}."""
    octets = [0, 1, 99, 255, 256, 300]
    for a in octets:
        for b in octets:
            for c in octets:
                for d in octets:
                    text = f"{a}.{b}.{c}.{d}"
                    oracle_ok = all(0 <= o <= 255 for o in (a, b, c, d))
                    try:
                        value = validate_ipv4(text)
                        ok = True
                    except Ipv4Error as err:
                        ok = False
                        assert err.code == "IP_OCTET_RANGE"
                    assert ok == oracle_ok, text
                    if ok:
                        assert value == (a << 24) | (b << 16) | (c << 8) | d


def test_fig3_topology_is_valid(fig3_topology):
    report = validate_topology(fig3_topology)
    assert report.status is Status.VALID
    assert report.findings == []


def test_octet_range_finding():
    topo = _topo("R1: interface Gi0/0 ip 192.168.0.300/24\n")
    report = validate_topology(topo)
    assert report.status is Status.INVALID
    assert [f.code for f in report.errors()] == ["IP_OCTET_RANGE"]


def test_prefix_range_finding():
    topo = _topo("R1: interface Gi0/0 ip 192.168.0.1/40\n")
    report = validate_topology(topo)
    assert "PREFIX_RANGE" in [f.code for f in report.errors()]


def test_duplicate_address_same_subnet():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R2: interface Gi0/0 ip 10.0.0.1/24\n"
    )
    report = validate_topology(topo)
    assert "DUPLICATE_ADDRESS" in [f.code for f in report.errors()]


def test_same_address_different_subnet_is_fine():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R2: interface Gi0/0 ip 10.1.0.1/24\n"
    )
    assert validate_topology(topo).status is Status.VALID


def test_link_subnet_mismatch_is_warning_not_error():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R2: interface Gi0/0 ip 10.9.0.2/24\n"
        "R1,R2: R1.Gi0/0 <-> R2.Gi0/0\n"
    )
    report = validate_topology(topo)
    assert report.status is Status.VALID
    assert [f.code for f in report.findings] == ["LINK_SUBNET_MISMATCH"]
    assert report.findings[0].severity is Severity.WARNING


def test_route_missing_details_needs_clarification():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R1: static_route\n"
    )
    report = validate_topology(topo)
    assert report.status is Status.NEEDS_CLARIFICATION
    finding = report.missing_info()[0]
    assert finding.code == "ROUTE_MISSING_DETAILS"
    assert finding.missing == ("destination", "via")


def test_route_no_adjacency_is_error():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R9: interface Gi0/0 ip 172.16.0.1/24\n"
        "R1: static_route 192.168.0.0/24 via R9\n"
    )
    report = validate_topology(topo)
    assert "ROUTE_NO_ADJACENCY" in [f.code for f in report.errors()]


def test_route_next_hop_not_connected():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R1: static_route 192.168.0.0/24 via 172.16.0.9\n"
    )
    report = validate_topology(topo)
    assert "ROUTE_NEXT_HOP_NOT_CONNECTED" in [f.code for f in report.errors()]


def test_route_host_bits_is_error():
    topo = _topo(
        "R1: interface Gi0/0 ip 10.0.0.1/24\n"
        "R2: interface Gi0/0 ip 10.0.0.2/24\n"
        "R1: static_route 192.168.0.5/24 via R2\n"
        "R1,R2: R1.Gi0/0 <-> R2.Gi0/0\n"
    )
    report = validate_topology(topo)
    assert "ROUTE_HOST_BITS" in [f.code for f in report.errors()]


def test_monotonicity_adding_clean_device_keeps_valid(fig3_topology):
    report = validate_topology(fig3_topology)
    assert report.status is Status.VALID
    import copy

    bigger = copy.deepcopy(fig3_topology)
    bigger.devices.append(
        DeviceSpec(
            hostname="R-4",
            node_type="router",
            interfaces=[InterfaceSpec(name="GigabitEthernet0/0", ipv4="10.50.0.1", prefix_len=24)],
        )
    )
    assert validate_topology(bigger).status is Status.VALID


def test_link_subnet_property_on_valid_no_warning_topologies(fig3_topology):
    report = validate_topology(fig3_topology)
    assert report.status is Status.VALID and not report.findings
    from text2net import ip

    for conn in fig3_topology.connections:
        if_a = fig3_topology.device(conn.endpoint_a.device).interface(conn.endpoint_a.interface)
        if_b = fig3_topology.device(conn.endpoint_b.device).interface(conn.endpoint_b.interface)
        plen = min(if_a.prefix_len, if_b.prefix_len)
        assert ip.network_int(ip.parse_ipv4(if_a.ipv4), plen) == ip.network_int(
            ip.parse_ipv4(if_b.ipv4), plen
        )


def test_make_clarification_prompt_is_frozen():
    topo = _topo(
        "R-1: interface Gi0/0 ip 192.168.0.1/24\n"
        "R-1: static_route\n"
    )
    report = validate_topology(topo)
    request = make_clarification(report)
    assert request.prompt == (
        "Please provide additional details about the static route:"
        " specify the source, destination, and through devices."
    )
    assert request.missing_fields == [
        ("device/R-1/static_route/0", "destination and via")
    ]


def test_make_clarification_two_routes_one_request():
    topo = _topo(
        "R-1: interface Gi0/0 ip 192.168.0.1/24\n"
        "R-1: static_route\n"
        "R-3: interface Gi0/0 ip 192.168.100.2/24\n"
        "R-3: static_route\n"
    )
    request = make_clarification(validate_topology(topo))
    assert isinstance(request, ClarificationRequest)
    assert len(request.missing_fields) == 2
    assert request.prompt.count("static route") == 1


def test_make_clarification_rejects_valid_report(fig3_topology):
    with pytest.raises(NotClarifiable):
        make_clarification(validate_topology(fig3_topology))


def test_report_serializable(fig3_topology):
    report = validate_topology(fig3_topology)
    data = report.to_dict()
    assert data == {"status": "Valid", "findings": []}
