"""Replay adapter: recorded responses keyed by normalized scenario text.

A fixture directory holds paired files: <name>.txt with the user-side
text, and either <name>.scs (command strings to return) or <name>.clarify
(question to ask). Multi-turn exchanges put the scenario and each reply in
the .txt file separated by a line containing only "---".

Keys are insensitive to case and incidental whitespace. No network access
ever happens here.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

from .base import (
    AdapterConfig,
    AdapterExchange,
    ClarifyOutcome,
    FixtureMiss,
    Outcome,
    ScsOutcome,
)

_TURN_SEPARATOR = "\n---\n"

_cache: dict[str, dict[str, Outcome]] = {}
_cache_lock = threading.Lock()


def normalize_key(text: str) -> str:
    collapsed = " ".join(text.lower().split())
    return hashlib.sha256(collapsed.encode("utf-8")).hexdigest()


def _load_fixtures(fixture_path: str) -> dict[str, Outcome]:
    with _cache_lock:
        cached = _cache.get(fixture_path)
        if cached is not None:
            return cached
        fixtures: dict[str, Outcome] = {}
        root = Path(fixture_path)
        if not root.is_dir():
            raise FixtureMiss(f"fixture directory {fixture_path!r} does not exist")
        for txt in sorted(root.glob("*.txt")):
            key = normalize_key(txt.read_text("utf-8"))
            scs_file = txt.with_suffix(".scs")
            clarify_file = txt.with_suffix(".clarify")
            if scs_file.exists():
                fixtures[key] = ScsOutcome(scs_text=scs_file.read_text("utf-8"))
            elif clarify_file.exists():
                fixtures[key] = ClarifyOutcome(
                    question=clarify_file.read_text("utf-8").strip()
                )
            else:
                raise FixtureMiss(f"fixture {txt.name} has no .scs or .clarify pair")
        _cache[fixture_path] = fixtures
        return fixtures


def replay_lookup(config: AdapterConfig, exchange: AdapterExchange) -> Outcome:
    fixtures = _load_fixtures(config.fixture_path)
    key = normalize_key(_TURN_SEPARATOR.join(exchange.user_texts()))
    outcome = fixtures.get(key)
    if outcome is None:
        raise FixtureMiss(
            "no recorded response for this scenario text"
            f" (known fixtures: {len(fixtures)})"
        )
    return outcome
