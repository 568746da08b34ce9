from __future__ import annotations

import threading
import time
from pathlib import Path

import pytest

from text2net import extractor, scs
from text2net.adapters import ScsOutcome, rules_convert
from text2net.prompts import scenario_text

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = Path(__file__).parent / "fixtures"

SCENARIOS = [
    "chain_story_a",
    "chain_story_b",
    "chain_story_vague",
    "single_router",
    "two_router_loopbacks",
    "three_router_transit",
]


@pytest.fixture(scope="session")
def scenario():
    return scenario_text


def scenario_topology(name: str, reply: str | None = None):
    """Scenario text -> resolved topology via the rules adapter."""
    text = scenario_text(name)
    if reply:
        text = text + "\n" + reply
    outcome = rules_convert(text)
    assert isinstance(outcome, ScsOutcome), f"{name} did not convert to SCS"
    doc = scs.parse_scs(outcome.scs_text)
    return extractor.resolve_routes(extractor.extract_topology(doc, strict=True))


@pytest.fixture(scope="session")
def fig3_topology():
    return scenario_topology("chain_story_a")


@pytest.fixture(scope="session")
def loopback_pair_topology():
    return scenario_topology("two_router_loopbacks")


@pytest.fixture(scope="session")
def transit_topology():
    return scenario_topology("three_router_transit")


@pytest.fixture()
def mock_eve():
    from text2net.eve.mock import MockEveServer

    server = MockEveServer()
    server.start()
    yield server
    server.stop()


class UvicornThread:
    """Run an ASGI app on an ephemeral loopback port for HTTP-level tests."""

    def __init__(self, app):
        import uvicorn

        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> str:
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("uvicorn did not start")
            time.sleep(0.02)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.module.__name__ == "test_acceptance":
        status = "PASS" if report.passed else "FAIL"
        item.config.pluginmanager.get_plugin("terminalreporter").write_line(
            f"[acceptance] {item.name}: {status}"
        )
