"""Conversational session state machine.

welcome -> scenario input -> adapter -> validation -> clarification loop
-> provisioning (simulator or emulator) -> interactive query phase.

Every user event produces exactly one system event; events illegal for
the current phase raise IllegalEventError instead. step_count counts
user-visible actions only (submissions, replies, queries), the unit the
evaluation compares against manual emulator work.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Union

from . import extractor, netsim, scs, validator
from .adapters import (
    AdapterConfig,
    AdapterError,
    AdapterExchange,
    ClarifyOutcome,
    RejectOutcome,
    ScsOutcome,
    UnparsableSentence,
    generate_scs,
)
from .netsim import SimNetwork
from .prompts import welcome_banner
from .topology import TopologyDocument
from .validator import Status


class Phase:
    AWAITING_SCENARIO = "AwaitingScenario"
    AWAITING_CLARIFICATION = "AwaitingClarification"
    PROVISIONED = "Provisioned"
    FAILED = "Failed"


@dataclass(frozen=True)
class SubmitScenario:
    text: str


@dataclass(frozen=True)
class Reply:
    text: str


@dataclass(frozen=True)
class Query:
    command: str


@dataclass(frozen=True)
class Reset:
    pass


UserEvent = Union[SubmitScenario, Reply, Query, Reset]


@dataclass
class SystemEvent:
    kind: str  # Welcome | AskClarification | ProvisionDone | QueryResult | Error
    text: str
    code: str | None = None
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"event": self.kind, "text": self.text}
        if self.code:
            out["code"] = self.code
        if self.payload:
            out["payload"] = self.payload
        return out


class IllegalEventError(Exception):
    def __init__(self, phase: str, event: UserEvent) -> None:
        super().__init__(f"{type(event).__name__} is not legal in phase {phase}")
        self.phase = phase


class Provisioner:
    """Target that turns a validated topology into a running network."""

    def provision(self, topo: TopologyDocument) -> tuple[str, SimNetwork | None]:
        raise NotImplementedError


class SimProvisioner(Provisioner):
    def provision(self, topo: TopologyDocument) -> tuple[str, SimNetwork | None]:
        net = netsim.instantiate(topo)
        summary = (
            f"Provisioned {len(topo.devices)} devices and"
            f" {len(topo.connections)} connections in the simulator."
        )
        return summary, net


class EveProvisioner(Provisioner):
    def __init__(self, base_url: str, username: str = "admin", lab_name: str = "t2n-lab") -> None:
        self.base_url = base_url
        self.username = username
        self.lab_name = lab_name
        self.last_report = None

    def provision(self, topo: TopologyDocument) -> tuple[str, SimNetwork | None]:
        from .eve import EveSession, execute, plan

        session = EveSession(
            base_url=self.base_url, username=self.username, lab_name=self.lab_name
        )
        report = execute(plan(topo, lab_name=self.lab_name), session)
        self.last_report = report
        summary = (
            f"Provisioned lab {self.lab_name!r} on {self.base_url}:"
            f" {len(report.completed)} API calls completed."
        )
        return summary, None


@dataclass
class SessionState:
    session_id: str
    backend: str = "sim"
    phase: str = Phase.AWAITING_SCENARIO
    adapter_config: AdapterConfig = field(default_factory=AdapterConfig)
    strict: bool = False
    history: list[dict] = field(default_factory=list)
    exchange: AdapterExchange | None = None
    scs_doc: scs.SCSDocument | None = None
    topology: TopologyDocument | None = None
    report: validator.ValidationReport | None = None
    sim: SimNetwork | None = None
    step_count: int = 0
    last_active: float = field(default_factory=time.monotonic)

    def transcript_append(self, role: str, kind: str, text: str) -> None:
        self.history.append({"role": role, "event": kind, "text": text})

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "backend": self.backend,
            "phase": self.phase,
            "transcript": self.history,
            "step_count": self.step_count,
            "topology": self.topology.to_dict() if self.topology else None,
        }


def welcome_event() -> SystemEvent:
    return SystemEvent(kind="Welcome", text=welcome_banner())


def count_steps(transcript: list[dict]) -> int:
    """User-visible actions in a transcript (Reset excluded)."""
    return sum(
        1 for entry in transcript if entry["role"] == "user" and entry["event"] != "Reset"
    )


def advance(
    state: SessionState,
    event: UserEvent,
    provisioner: Provisioner | None = None,
) -> tuple[SessionState, SystemEvent]:
    """Apply one user event; returns the state and the single response."""
    state.last_active = time.monotonic()

    if isinstance(event, Reset):
        state.transcript_append("user", "Reset", "")
        state.phase = Phase.AWAITING_SCENARIO
        state.exchange = None
        state.scs_doc = None
        state.topology = None
        state.report = None
        state.sim = None
        out = welcome_event()
        state.transcript_append("system", out.kind, out.text)
        return state, out

    if isinstance(event, SubmitScenario):
        if state.phase != Phase.AWAITING_SCENARIO:
            raise IllegalEventError(state.phase, event)
        state.step_count += 1
        state.transcript_append("user", "SubmitScenario", event.text)
        if not event.text.strip():
            out = SystemEvent(
                kind="Error",
                code="EMPTY_SCENARIO",
                text="The scenario is empty. Please describe your network in plain English.",
            )
            state.transcript_append("system", out.kind, out.text)
            return state, out
        state.exchange = AdapterExchange(scenario_text=event.text)
        out = _run_adapter(state, provisioner)
        state.transcript_append("system", out.kind, out.text)
        return state, out

    if isinstance(event, Reply):
        if state.phase != Phase.AWAITING_CLARIFICATION:
            raise IllegalEventError(state.phase, event)
        state.step_count += 1
        state.transcript_append("user", "Reply", event.text)
        state.exchange.history.append(("user", event.text))
        out = _run_adapter(state, provisioner)
        state.transcript_append("system", out.kind, out.text)
        return state, out

    if isinstance(event, Query):
        if state.phase != Phase.PROVISIONED:
            raise IllegalEventError(state.phase, event)
        state.step_count += 1
        state.transcript_append("user", "Query", event.command)
        out = run_query(state, event.command)
        state.transcript_append("system", out.kind, out.text)
        return state, out

    raise IllegalEventError(state.phase, event)


def _run_adapter(state: SessionState, provisioner: Provisioner | None) -> SystemEvent:
    try:
        outcome = generate_scs(state.adapter_config, state.exchange)
    except UnparsableSentence as exc:
        state.phase = Phase.AWAITING_SCENARIO
        return SystemEvent(kind="Error", code="UNPARSABLE_SENTENCE", text=str(exc))
    except AdapterError as exc:
        state.phase = Phase.FAILED
        return SystemEvent(kind="Error", code="ADAPTER_ERROR", text=str(exc))

    if isinstance(outcome, RejectOutcome):
        state.phase = Phase.AWAITING_SCENARIO
        return SystemEvent(kind="Error", code="SCENARIO_REJECTED", text=outcome.reason)

    if isinstance(outcome, ClarifyOutcome):
        state.exchange.history.append(("system", outcome.question))
        state.phase = Phase.AWAITING_CLARIFICATION
        return SystemEvent(kind="AskClarification", text=outcome.question)

    return _provision_scs(state, outcome, provisioner)


def _provision_scs(
    state: SessionState, outcome: ScsOutcome, provisioner: Provisioner | None
) -> SystemEvent:
    try:
        state.scs_doc = scs.parse_scs(outcome.scs_text)
        topo = extractor.extract_topology(state.scs_doc, strict=state.strict)
    except (scs.ScsError, extractor.ExtractionError) as exc:
        state.phase = Phase.AWAITING_SCENARIO
        return SystemEvent(kind="Error", code="EXTRACTION_FAILED", text=str(exc))

    report = validator.validate_topology(topo)
    state.report = report
    if report.status is Status.INVALID:
        state.phase = Phase.AWAITING_SCENARIO
        findings = "; ".join(f"{f.code}: {f.message}" for f in report.errors())
        return SystemEvent(
            kind="Error",
            code="VALIDATION_INVALID",
            text=f"The scenario is invalid: {findings}",
            payload=report.to_dict(),
        )
    if report.status is Status.NEEDS_CLARIFICATION:
        request = validator.make_clarification(report)
        state.exchange.history.append(("system", request.prompt))
        state.phase = Phase.AWAITING_CLARIFICATION
        return SystemEvent(
            kind="AskClarification", text=request.prompt, payload=request.to_dict()
        )

    resolved = extractor.resolve_routes(topo)
    state.topology = resolved
    provisioner = provisioner or SimProvisioner()
    try:
        summary, sim = provisioner.provision(resolved)
    except Exception as exc:  # emulator/API failures carry partial detail
        state.phase = Phase.FAILED
        return SystemEvent(kind="Error", code="PROVISION_FAILED", text=str(exc))
    state.sim = sim
    state.phase = Phase.PROVISIONED
    return SystemEvent(
        kind="ProvisionDone",
        text=f"{outcome.acknowledgment}\n{summary}",
        payload={"devices": len(resolved.devices), "connections": len(resolved.connections)},
    )


def run_query(state: SessionState, command: str) -> SystemEvent:
    """Execute one query command against the provisioned network."""
    parts = command.split()
    if len(parts) == 3 and parts[0] == "ping":
        if state.sim is None:
            return SystemEvent(
                kind="Error",
                code="QUERY_UNSUPPORTED_BACKEND",
                text="ping is only available on the simulator backend",
            )
        try:
            result = netsim.ping(state.sim, parts[1], parts[2])
        except netsim.SimError as exc:
            return SystemEvent(kind="Error", code="QUERY_FAILED", text=str(exc))
        if result.success:
            text = f"ping {parts[2]}: success, path {' -> '.join(result.forward_path)}"
        else:
            text = (
                f"ping {parts[2]}: failed ({result.failure_reason.value}),"
                f" reached {' -> '.join(result.forward_path)}"
            )
        return SystemEvent(kind="QueryResult", text=text, payload=result.to_dict())

    if len(parts) == 3 and parts[0] == "show" and parts[1] == "config":
        if state.sim is None:
            return SystemEvent(
                kind="Error",
                code="QUERY_UNSUPPORTED_BACKEND",
                text="show config is only available on the simulator backend",
            )
        try:
            text = netsim.show_config(state.sim, parts[2])
        except netsim.UnknownDevice as exc:
            return SystemEvent(kind="Error", code="UNKNOWN_DEVICE", text=str(exc))
        return SystemEvent(kind="QueryResult", text=text)

    if parts == ["show", "topology"]:
        lines = []
        for dev in state.topology.canonical().devices:
            ifaces = ", ".join(
                f"{i.name} {i.ipv4}/{i.prefix_len}" for i in dev.interfaces
            )
            lines.append(f"{dev.hostname} ({dev.node_type}): {ifaces}")
        for conn in state.topology.canonical().connections:
            lines.append(
                f"net{conn.network_id}: {conn.endpoint_a.device}.{conn.endpoint_a.interface}"
                f" <-> {conn.endpoint_b.device}.{conn.endpoint_b.interface}"
            )
        return SystemEvent(kind="QueryResult", text="\n".join(lines))

    return SystemEvent(
        kind="Error",
        code="UNKNOWN_QUERY",
        text="Commands: ping <host> <address> | show config <host> | show topology",
    )


class SessionStore:
    """In-memory session registry with per-session serialized events."""

    def __init__(self, idle_timeout: float = 3600.0) -> None:
        self.idle_timeout = idle_timeout
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._provisioners: dict[str, Provisioner] = {}
        self._guard = threading.Lock()

    def create(
        self,
        backend: str = "sim",
        adapter_config: AdapterConfig | None = None,
        provisioner: Provisioner | None = None,
        strict: bool = False,
    ) -> tuple[SessionState, SystemEvent]:
        state = SessionState(
            session_id=uuid.uuid4().hex,
            backend=backend,
            adapter_config=adapter_config or AdapterConfig(),
            strict=strict,
        )
        out = welcome_event()
        state.transcript_append("system", out.kind, out.text)
        with self._guard:
            self._sessions[state.session_id] = state
            self._locks[state.session_id] = threading.Lock()
            self._provisioners[state.session_id] = provisioner or SimProvisioner()
        return state, out

    def get(self, session_id: str) -> SessionState | None:
        with self._guard:
            state = self._sessions.get(session_id)
            if state is None:
                return None
            if time.monotonic() - state.last_active > self.idle_timeout:
                self._sessions.pop(session_id, None)
                self._locks.pop(session_id, None)
                self._provisioners.pop(session_id, None)
                return None
            return state

    def handle(self, session_id: str, event: UserEvent) -> tuple[SessionState, SystemEvent]:
        state = self.get(session_id)
        if state is None:
            raise KeyError(session_id)
        lock = self._locks[session_id]
        with lock:
            return advance(state, event, self._provisioners[session_id])
