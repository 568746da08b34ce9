import socket

import pytest

from text2net import scs
from text2net.adapters import (
    AdapterConfig,
    AdapterExchange,
    ClarifyOutcome,
    FixtureMiss,
    RejectOutcome,
    ScsOutcome,
    UnparsableSentence,
    generate_scs,
    rules_convert,
)
from text2net.prompts import bundled_replay_dir, scenario_text, static_route_question
from text2net.scs import LineKind

from conftest import SCENARIOS


@pytest.fixture()
def no_network(monkeypatch):
    """Fail the test if anything opens a socket."""

    def guard(*args, **kwargs):
        raise AssertionError("network access attempted by an offline backend")

    monkeypatch.setattr(socket, "socket", guard)
    monkeypatch.setattr(socket, "create_connection", guard)


def _closure_check(scs_text: str) -> None:
    doc = scs.parse_scs(scs_text)
    for key, lines in doc.entries:
        for line in lines:
            assert scs.classify_line(line).kind is not LineKind.UNKNOWN, (key, line)


# --- rules backend ----------------------------------------------------------

def test_rules_single_router_scenario():
    out = rules_convert(scenario_text("single_router"))
    assert isinstance(out, ScsOutcome)
    assert "R1: type router" in out.scs_text
    assert "R1: interface FastEthernet0/1 ip 192.168.0.1/24" in out.scs_text


def test_rules_transit_scenario_example():
    out = rules_convert(
        "R1 is a router connected to R2. R1 interface Gigabit Ethernet 0/0 has IP"
        " address 192.168.0.1/24 and is connected to R2 interface Gigabit Ethernet 0/0"
        " with IP address 192.168.0.2/24."
    )
    assert isinstance(out, ScsOutcome)
    assert "R1: interface GigabitEthernet0/0 ip 192.168.0.1/24" in out.scs_text
    assert "R1,R2: R1.GigabitEthernet0/0 <-> R2.GigabitEthernet0/0" in out.scs_text


def test_rules_vague_routes_clarify():
    out = rules_convert(scenario_text("chain_story_vague"))
    assert isinstance(out, ClarifyOutcome)
    assert out.question == static_route_question()
    assert "static route" in out.question


def test_rules_route_mention_without_any_details_clarifies():
    out = rules_convert(
        "Configure a router as R1 with basic setup. Configure the interface Fast"
        " Ethernet 0/1 with IP address 10.0.0.1 and subnet mask 255.255.255.0."
        " The design relies on static routes."
    )
    assert isinstance(out, ClarifyOutcome)


def test_rules_loopback_destinations_derived():
    out = rules_convert(scenario_text("two_router_loopbacks"))
    assert isinstance(out, ScsOutcome)
    assert "R1: static_route 192.168.2.0/24 via R2" in out.scs_text
    assert "R2: static_route 192.168.1.0/24 via R1" in out.scs_text


def test_rules_unparsable_sentence_reports_index():
    with pytest.raises(UnparsableSentence) as err:
        rules_convert(
            "Configure a router as R1 with basic setup."
            " The gizmo interface should swizzle 192.168.0.1 backwards."
        )
    assert err.value.index == 1


def test_rules_rejects_non_scenario_text():
    out = rules_convert("please write a poem about otters")
    assert isinstance(out, RejectOutcome)


def test_rules_mask_form_normalized():
    out = rules_convert(
        "Configure a router as R9 with basic setup. Configure the interface"
        " Fast Ethernet 0/1 with IP address 10.1.2.3 and subnet mask 255.255.240.0."
    )
    assert isinstance(out, ScsOutcome)
    assert "ip 10.1.2.3/20" in out.scs_text


def test_rules_corpus_closure_offline(no_network):
    """Every Scs outcome parses with zero Unknown lines, with networking
    denied for the whole corpus run."""
    config = AdapterConfig(backend="rules")
    for name in SCENARIOS:
        exchange = AdapterExchange(scenario_text=scenario_text(name))
        if name == "chain_story_vague":
            exchange.history.append(("system", static_route_question()))
            exchange.history.append(("user", scenario_text("chain_story_vague_reply")))
        outcome = generate_scs(config, exchange)
        assert isinstance(outcome, ScsOutcome), name
        assert outcome.acknowledgment == "Understood"
        _closure_check(outcome.scs_text)


# --- replay backend ---------------------------------------------------------

@pytest.fixture(scope="module")
def replay_config():
    return AdapterConfig(backend="replay", fixture_path=bundled_replay_dir())


def test_replay_scenario1_returns_fig3_scs(replay_config):
    outcome = generate_scs(
        replay_config, AdapterExchange(scenario_text=scenario_text("chain_story_a"))
    )
    assert isinstance(outcome, ScsOutcome)
    assert "R-1: static_route 192.168.100.0/24 via R-2" in outcome.scs_text


def test_replay_scenario3_clarifies_verbatim(replay_config):
    outcome = generate_scs(
        replay_config, AdapterExchange(scenario_text=scenario_text("chain_story_vague"))
    )
    assert isinstance(outcome, ClarifyOutcome)
    assert outcome.question.endswith(
        "Could you specify the source, destination, and through devices for each static route?"
    )


def test_replay_two_turn_fixture(replay_config):
    exchange = AdapterExchange(scenario_text=scenario_text("chain_story_vague"))
    exchange.history.append(("system", static_route_question()))
    exchange.history.append(("user", scenario_text("chain_story_vague_reply")))
    outcome = generate_scs(replay_config, exchange)
    assert isinstance(outcome, ScsOutcome)


def test_replay_key_normalization_tolerates_whitespace_and_case(replay_config):
    message = "  " + scenario_text("single_router").upper().replace(". ", ".\n\n") + "  "
    outcome = generate_scs(replay_config, AdapterExchange(scenario_text=message))
    assert isinstance(outcome, ScsOutcome)


def test_replay_miss(replay_config):
    with pytest.raises(FixtureMiss):
        generate_scs(replay_config, AdapterExchange(scenario_text="never recorded"))


def test_replay_deterministic_offline(no_network, replay_config):
    exchange = AdapterExchange(scenario_text=scenario_text("two_router_loopbacks"))
    first = generate_scs(replay_config, exchange)
    second = generate_scs(replay_config, exchange)
    assert first == second


def test_replay_corpus_closure(replay_config, no_network):
    for name in SCENARIOS:
        outcome = generate_scs(
            replay_config, AdapterExchange(scenario_text=scenario_text(name))
        )
        if isinstance(outcome, ScsOutcome):
            _closure_check(outcome.scs_text)


def test_rules_determinism():
    text = scenario_text("chain_story_b")
    assert rules_convert(text) == rules_convert(text)


# --- config invariants --------------------------------------------------------

def test_config_requires_backend_fields():
    with pytest.raises(ValueError):
        AdapterConfig(backend="http")
    with pytest.raises(ValueError):
        AdapterConfig(backend="replay")
    with pytest.raises(ValueError):
        AdapterConfig(backend="carrier-pigeon")
