"""Terminal front end: interactive REPL and non-interactive batch mode.

Batch exit codes:
    0  provisioning succeeded and all expectations held
    1  validation rejected the scenario (or an expectation failed)
    2  backend / adapter error
    3  clarification needed (machine-readable JSON on stdout)
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .adapters import AdapterConfig
from .orchestrator import (
    EveProvisioner,
    Phase,
    Query,
    Reply,
    Reset,
    SessionState,
    SimProvisioner,
    SubmitScenario,
    SystemEvent,
    advance,
    welcome_event,
)

_INPUT_ERROR_CODES = {
    "VALIDATION_INVALID",
    "SCENARIO_REJECTED",
    "UNPARSABLE_SENTENCE",
    "EXTRACTION_FAILED",
    "EMPTY_SCENARIO",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="t2n",
        description="Build network topologies from plain-English scenarios.",
    )
    parser.add_argument("--backend", choices=("sim", "eve"), default="sim",
                        help="provisioning target (default: sim)")
    parser.add_argument("--adapter", choices=("rules", "replay", "http"), default="rules",
                        help="scenario-to-SCS backend (default: rules)")
    parser.add_argument("--scenario", metavar="FILE",
                        help="scenario text file; enables batch mode")
    parser.add_argument("--out", metavar="FILE", help="write topology JSON here")
    parser.add_argument("--expect", metavar="FILE",
                        help="file of 'expect ...' query expectations (batch mode)")
    parser.add_argument("--strict", action="store_true",
                        help="fail on unrecognized SCS statements")
    parser.add_argument("--fixtures", metavar="DIR",
                        help="replay fixture directory (default: bundled fixtures)")
    parser.add_argument("--llm-endpoint", metavar="URL",
                        default=os.environ.get("T2N_LLM_ENDPOINT"),
                        help="chat-completion endpoint for the http adapter")
    parser.add_argument("--llm-model", metavar="NAME", help="model name for the http adapter")
    parser.add_argument("--eve-url", metavar="URL", default=os.environ.get("T2N_EVE_URL"),
                        help="emulator API base URL for the eve backend")
    parser.add_argument("--eve-user", metavar="NAME", default="admin")
    parser.add_argument("--eve-lab", metavar="NAME", default="t2n-lab")
    return parser


def make_adapter_config(args: argparse.Namespace) -> AdapterConfig:
    if args.adapter == "replay":
        from .prompts import bundled_replay_dir

        return AdapterConfig(
            backend="replay", fixture_path=args.fixtures or bundled_replay_dir()
        )
    if args.adapter == "http":
        if not args.llm_endpoint:
            raise SystemExit("--llm-endpoint (or T2N_LLM_ENDPOINT) is required for http")
        return AdapterConfig(
            backend="http", endpoint_url=args.llm_endpoint, model_name=args.llm_model
        )
    return AdapterConfig(backend="rules")


def make_provisioner(args: argparse.Namespace):
    if args.backend == "eve":
        if not args.eve_url:
            raise SystemExit("--eve-url (or T2N_EVE_URL) is required for the eve backend")
        return EveProvisioner(args.eve_url, username=args.eve_user, lab_name=args.eve_lab)
    return SimProvisioner()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        adapter_config = make_adapter_config(args)
        provisioner = make_provisioner(args)
    except SystemExit as exc:
        print(exc, file=sys.stderr)
        return 2
    state = SessionState(
        session_id="cli", backend=args.backend, adapter_config=adapter_config,
        strict=args.strict,
    )
    if args.scenario:
        return run_batch(args, state, provisioner)
    return run_repl(state, provisioner)


def run_repl(state: SessionState, provisioner) -> int:
    print(welcome_event().text)
    while True:
        try:
            line = input("t2n> ")
        except EOFError:
            print()
            return 0
        line = line.strip()
        if line in ("quit", "exit"):
            return 0
        if not line:
            continue
        if line == "reset":
            _, event = advance(state, Reset(), provisioner)
            print(event.text)
            continue
        if state.phase == Phase.AWAITING_CLARIFICATION:
            user_event = Reply(line)
        elif state.phase == Phase.PROVISIONED:
            user_event = Query(line)
        else:
            user_event = SubmitScenario(line)
        _, event = advance(state, user_event, provisioner)
        _print_event(event)
        if event.kind == "Error" and event.code in ("ADAPTER_ERROR", "PROVISION_FAILED"):
            return 2


def _print_event(event: SystemEvent) -> None:
    if event.kind == "Error":
        print(f"error[{event.code}]: {event.text}")
    else:
        print(event.text)


def run_batch(args: argparse.Namespace, state: SessionState, provisioner) -> int:
    try:
        scenario = open(args.scenario, encoding="utf-8").read()
    except OSError as exc:
        print(f"cannot read scenario file: {exc}", file=sys.stderr)
        return 2

    _, event = advance(state, SubmitScenario(scenario), provisioner)

    if event.kind == "AskClarification":
        print(json.dumps(event.payload or {"prompt": event.text, "missing_fields": []},
                         indent=2, sort_keys=True))
        return 3
    if event.kind == "Error":
        print(f"error[{event.code}]: {event.text}", file=sys.stderr)
        if event.payload:
            print(json.dumps(event.payload, indent=2, sort_keys=True))
        return 1 if event.code in _INPUT_ERROR_CODES else 2

    topology_json = state.topology.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(topology_json)
    else:
        print(topology_json, end="")

    if args.expect:
        return _run_expectations(args.expect, state, provisioner)
    return 0


def _run_expectations(path: str, state: SessionState, provisioner) -> int:
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        print(f"cannot read expectations file: {exc}", file=sys.stderr)
        return 2
    failures = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("expect "):
            print(f"bad expectation line: {line!r}", file=sys.stderr)
            return 2
        ok = _check_expectation(line[len("expect "):], state, provisioner)
        print(f"{'ok' if ok else 'FAIL'}: {line}")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 1


def _check_expectation(spec: str, state: SessionState, provisioner) -> bool:
    parts = spec.split()
    if len(parts) == 4 and parts[0] == "ping" and parts[3] in ("success", "failure"):
        _, event = advance(state, Query(f"ping {parts[1]} {parts[2]}"), provisioner)
        want = parts[3] == "success"
        return event.kind == "QueryResult" and event.payload.get("success") is want
    if parts[:2] == ["show", "config"] and "contains" in parts:
        contains_at = parts.index("contains")
        host = parts[2]
        needle = " ".join(parts[contains_at + 1:])
        _, event = advance(state, Query(f"show config {host}"), provisioner)
        return event.kind == "QueryResult" and needle in event.text
    print(f"unrecognized expectation: {spec!r}", file=sys.stderr)
    return False


if __name__ == "__main__":
    sys.exit(main())
