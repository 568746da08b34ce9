"""Frozen user-facing wording and bundled scenario fixtures.

All dialog strings live in data/prompts.json so tests can assert exact
text; code never builds clarification wording ad hoc.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def _registry() -> dict:
    data = resources.files("text2net").joinpath("data/prompts.json").read_text("utf-8")
    return json.loads(data)


def welcome_banner() -> str:
    return _registry()["welcome_banner"]


def acknowledgment() -> str:
    return _registry()["understood"]


def static_route_question() -> str:
    return _registry()["clarify_static_route"]


def clarification_template(code: str) -> str:
    templates = _registry()["validator_templates"]
    return templates.get(code, f"Please provide additional details ({code}).")


def scenario_text(name: str) -> str:
    """Bundled example scenario by file stem (see data/scenarios)."""
    path = resources.files("text2net").joinpath(f"data/scenarios/{name}.txt")
    return path.read_text("utf-8").strip()


def bundled_replay_dir() -> str:
    """Filesystem path of the bundled replay fixtures."""
    return str(resources.files("text2net").joinpath("data/replay"))


def system_prompt() -> str:
    return resources.files("text2net").joinpath("data/system_prompt.txt").read_text("utf-8")
