"""Acceptance suite: one test per release criterion.

Run with `pytest tests/test_acceptance.py -v`; the conftest hook prints a
PASS/FAIL line per criterion. Timing bounds are asserted where the
criterion states one.
"""

from __future__ import annotations

import itertools
import random
import socket
import time

import pytest

from text2net import netsim, scs
from text2net.adapters import (
    AdapterConfig,
    AdapterExchange,
    ClarifyOutcome,
    ScsOutcome,
    generate_scs,
    rules_convert,
)
from text2net.cli import main as cli_main
from text2net.extractor import extract_topology, resolve_routes
from text2net.eve import (
    EveSession,
    PlanAborted,
    execute,
    plan,
    provisioning_form,
    read_back,
)
from text2net.orchestrator import (
    Phase,
    Query,
    Reply,
    SessionState,
    SubmitScenario,
    advance,
)
from text2net.prompts import bundled_replay_dir, scenario_text, static_route_question
from text2net.scs import LineKind
from text2net.validator import Status, validate_topology

from conftest import FIXTURES, GOLDEN, SCENARIOS
from test_netsim_oracle import _random_destination, oracle_ping, random_topology


def _convert_to_topology(text: str):
    outcome = rules_convert(text)
    assert isinstance(outcome, ScsOutcome)
    doc = scs.parse_scs(outcome.scs_text)
    return resolve_routes(extract_topology(doc, strict=True))


def test_narrative_invariance_fig3():
    """Two different tellings of the three-router chain produce
    byte-identical topology JSON matching the frozen reference."""
    start = time.monotonic()
    topo_a = _convert_to_topology(scenario_text("chain_story_a"))
    topo_b = _convert_to_topology(scenario_text("chain_story_b"))
    json_a, json_b = topo_a.to_json(), topo_b.to_json()
    elapsed = time.monotonic() - start

    assert json_a == json_b
    assert json_a == (GOLDEN / "fig3_topology.json").read_text()

    assert len(topo_a.devices) == 3
    assert len(topo_a.connections) == 2
    addresses = sorted(
        f"{i.ipv4}/{i.prefix_len}" for d in topo_a.devices for i in d.interfaces
    )
    assert addresses == [
        "192.168.0.1/24", "192.168.0.2/24", "192.168.100.1/24", "192.168.100.2/24",
    ]
    routes = {
        (d.hostname, r.via, r.resolved_next_hop)
        for d in topo_a.devices for r in d.static_routes
    }
    assert routes == {
        ("R-1", "R-2", "192.168.0.2"),
        ("R-3", "R-2", "192.168.100.1"),
    }
    assert elapsed < 1.0


def test_clarification_behavior_scenario3():
    """The vague telling asks the frozen static-route question and the
    detailed reply completes provisioning."""
    state = SessionState(session_id="acc")
    state, event = advance(state, SubmitScenario(scenario_text("chain_story_vague")))
    assert state.phase == Phase.AWAITING_CLARIFICATION
    assert event.kind == "AskClarification"
    assert "static routing" in event.text
    assert event.text == static_route_question()  # frozen fixture string

    state, event = advance(
        state,
        Reply(
            "static route on R-1 to 192.168.100.0/24 via R-2"
            " and on R-3 to 192.168.0.0/24 via R-2"
        ),
    )
    assert event.kind == "ProvisionDone"
    assert state.phase == Phase.PROVISIONED
    report = validate_topology(state.topology)
    assert report.status is Status.VALID


def test_invalid_input_detection(tmp_path, capsys):
    """An out-of-range octet is rejected with IP_OCTET_RANGE and batch
    mode exits 1."""
    state = SessionState(session_id="acc")
    state, event = advance(state, SubmitScenario((FIXTURES / "bad_ip.txt").read_text()))
    assert event.kind == "Error" and event.code == "VALIDATION_INVALID"
    assert "IP_OCTET_RANGE" in [f["code"] for f in event.payload["findings"]]

    code = cli_main(["--scenario", str(FIXTURES / "bad_ip.txt"),
                     "--out", str(tmp_path / "t.json")])
    assert code == 1
    assert "IP_OCTET_RANGE" in capsys.readouterr().err


def test_eval_scenario1_two_steps():
    """End-to-end single-router run: one submission plus one
    configuration check."""
    state = SessionState(session_id="acc")
    state, event = advance(state, SubmitScenario(scenario_text("single_router")))
    assert event.kind == "ProvisionDone"
    state, event = advance(state, Query("show config R1"))
    assert event.kind == "QueryResult"
    assert state.step_count == 2
    assert "hostname R1" in event.text
    assert "FastEthernet0/1 192.168.0.1 255.255.255.0" in event.text


def test_eval_scenarios_2_3_reachability_and_route_necessity():
    """Loopback-to-loopback ping works both ways; scenario 3 transits the
    middle router; removing any single static route breaks a direction."""
    for name, far_host, path_len in (
        ("two_router_loopbacks", "R2", 2),
        ("three_router_transit", "R3", 3),
    ):
        start = time.monotonic()
        topo = _convert_to_topology(scenario_text(name))
        net = netsim.instantiate(topo)

        forward = netsim.ping(net, "R1", "192.168.2.1")
        reverse = netsim.ping(net, far_host, "192.168.1.1")
        assert forward.success and reverse.success, name
        assert len(forward.forward_path) == path_len

        routes = [
            (dev.hostname, route.destination, route.dest_prefix_len)
            for dev in topo.devices
            for route in dev.static_routes
        ]
        for hostname, dest, plen in routes:
            mutated = netsim.instantiate(topo)
            mutated.remove_static_route(hostname, dest, plen)
            still_forward = netsim.ping(mutated, "R1", "192.168.2.1").success
            still_reverse = netsim.ping(mutated, far_host, "192.168.1.1").success
            assert not (still_forward and still_reverse), (name, hostname, dest)
        assert time.monotonic() - start < 1.0, name


def test_simulator_oracle_equivalence_1000():
    """Ping agrees with the brute-force bidirectional oracle on 1000
    random valid topologies."""
    rng = random.Random(424242)
    start = time.monotonic()
    for case in range(1000):
        topo = random_topology(rng)
        assert validate_topology(topo).status is Status.VALID
        resolved = resolve_routes(topo)
        net = netsim.instantiate(resolved)
        src = rng.choice(sorted(net.nodes))
        dst = _random_destination(rng, resolved)
        assert netsim.ping(net, src, dst).success == oracle_ping(net, src, dst), (
            case, src, dst,
        )
    assert time.monotonic() - start < 60.0


def test_provisioning_plan_and_mock_round_trip(monkeypatch):
    """Plan arithmetic, legal ordering, byte-identical read-back, and both
    fault-injection behaviors against the bundled emulator mock."""
    from text2net.eve.mock import MockEveServer

    monkeypatch.setenv("T2N_EVE_PASSWORD", "acceptance")
    topo = _convert_to_topology(scenario_text("chain_story_a"))

    p = plan(topo)
    counts = p.counts()
    assert counts["create_node"] == 3
    assert counts["create_network"] == 2
    assert counts["link"] == 4
    kinds = [c.kind for c in p.calls]
    assert max(i for i, k in enumerate(kinds) if k.startswith("create")) < kinds.index("link")

    server = MockEveServer()
    server.start()
    try:
        session = EveSession(base_url=server.base_url)
        report = execute(p, session)
        assert report.failed == []
        assert read_back(session).to_json() == provisioning_form(topo).to_json()
    finally:
        server.stop()

    server = MockEveServer()
    server.start()
    try:
        server.fail_on("create_node", occurrence=2)
        with pytest.raises(PlanAborted) as aborted:
            execute(plan(topo), EveSession(base_url=server.base_url))
        partial = aborted.value.report
        assert [c for c in partial.completed if c.startswith("create_node")] == [
            "create_node:R-1"
        ]
        assert partial.failed[0]["call"] == "create_node:R-2"
    finally:
        server.stop()

    server = MockEveServer()
    server.start()
    try:
        server.expire_session_after(5)
        report = execute(plan(topo), EveSession(base_url=server.base_url))
        assert report.failed == []
        assert report.relogins == 1
    finally:
        server.stop()


def test_adapter_output_closure_offline(monkeypatch):
    """Every Scs outcome across the corpus parses with zero Unknown lines
    in strict mode; rules and replay run with networking denied."""

    def guard(*args, **kwargs):
        raise AssertionError("network access attempted")

    monkeypatch.setattr(socket, "socket", guard)
    monkeypatch.setattr(socket, "create_connection", guard)

    configs = [
        AdapterConfig(backend="rules"),
        AdapterConfig(backend="replay", fixture_path=bundled_replay_dir()),
    ]
    reply = scenario_text("chain_story_vague_reply")
    scs_outcomes = 0
    for config, name in itertools.product(configs, SCENARIOS):
        exchange = AdapterExchange(scenario_text=scenario_text(name))
        outcome = generate_scs(config, exchange)
        if isinstance(outcome, ClarifyOutcome):
            exchange.history.append(("system", outcome.question))
            exchange.history.append(("user", reply))
            outcome = generate_scs(config, exchange)
        assert isinstance(outcome, ScsOutcome), (config.backend, name)
        doc = scs.parse_scs(outcome.scs_text)
        for key, lines in doc.entries:
            for line in lines:
                assert scs.classify_line(line).kind is not LineKind.UNKNOWN, (key, line)
        extract_topology(doc, strict=True)
        scs_outcomes += 1
    assert scs_outcomes == len(configs) * len(SCENARIOS)
