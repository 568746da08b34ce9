from .base import (
    AdapterConfig,
    AdapterError,
    AdapterExchange,
    AuthFailure,
    BackendTimeout,
    BackendUnreachable,
    ClarifyOutcome,
    FixtureMiss,
    MalformedModelOutput,
    Outcome,
    RejectOutcome,
    ScsOutcome,
    generate_scs,
)
from .rules import UnparsableSentence, rules_convert

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "AdapterExchange",
    "AuthFailure",
    "BackendTimeout",
    "BackendUnreachable",
    "ClarifyOutcome",
    "FixtureMiss",
    "MalformedModelOutput",
    "Outcome",
    "RejectOutcome",
    "ScsOutcome",
    "UnparsableSentence",
    "generate_scs",
    "rules_convert",
]
