"""Pluggable scenario-to-SCS boundary.

Three interchangeable backends produce the same outcome type: an HTTP
chat-completion model, a deterministic constrained-English converter
("rules") and a replay adapter serving recorded fixtures. An Scs outcome
is always self-checked against the SCS grammar before it leaves this
module, so downstream code never sees unparsable command strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .. import scs
from ..prompts import acknowledgment, system_prompt
from ..scs import LineKind


class AdapterError(Exception):
    pass


class BackendUnreachable(AdapterError):
    pass


class BackendTimeout(AdapterError):
    pass


class AuthFailure(AdapterError):
    pass


class MalformedModelOutput(AdapterError):
    pass


class FixtureMiss(AdapterError):
    pass


@dataclass
class ScsOutcome:
    scs_text: str
    acknowledgment: str = field(default_factory=acknowledgment)


@dataclass
class ClarifyOutcome:
    question: str


@dataclass
class RejectOutcome:
    reason: str


Outcome = Union[ScsOutcome, ClarifyOutcome, RejectOutcome]

BACKENDS = ("http", "rules", "replay")


@dataclass
class AdapterConfig:
    backend: str = "rules"
    endpoint_url: str | None = None
    model_name: str | None = None
    system_prompt: str = field(default_factory=system_prompt)
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base: float = 0.5
    fixture_path: str | None = None

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown adapter backend {self.backend!r}")
        if self.backend == "http" and not self.endpoint_url:
            raise ValueError("http backend requires endpoint_url")
        if self.backend == "replay" and not self.fixture_path:
            raise ValueError("replay backend requires fixture_path")


@dataclass
class AdapterExchange:
    """One conversation with the adapter.

    history holds the turns after the initial scenario (questions asked
    and replies given) and only ever grows.
    """

    scenario_text: str
    history: list[tuple[str, str]] = field(default_factory=list)

    def user_texts(self) -> list[str]:
        texts = [self.scenario_text]
        texts.extend(text for role, text in self.history if role == "user")
        return texts


def self_check_scs(text: str) -> None:
    """Reject SCS that does not parse cleanly with zero unknown lines."""
    try:
        doc = scs.parse_scs(text)
    except scs.ScsError as exc:
        raise MalformedModelOutput(f"output is not valid SCS: {exc}") from exc
    for key, lines in doc.entries:
        for line in lines:
            if scs.classify_line(line).kind is LineKind.UNKNOWN:
                raise MalformedModelOutput(
                    f"output contains an unrecognized statement under {key!r}: {line!r}"
                )


def generate_scs(config: AdapterConfig, exchange: AdapterExchange) -> Outcome:
    """Run one adapter exchange and return exactly one outcome."""
    if config.backend == "rules":
        from .rules import rules_convert

        outcome = rules_convert("\n".join(exchange.user_texts()))
    elif config.backend == "replay":
        from .replay import replay_lookup

        outcome = replay_lookup(config, exchange)
    else:
        from .http import http_generate

        outcome = http_generate(config, exchange)

    if isinstance(outcome, ScsOutcome):
        self_check_scs(outcome.scs_text)
    return outcome
