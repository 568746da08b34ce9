"""HTTP chat-completion backend.

Speaks the common chat JSON wire shape: POST {endpoint_url} with
{"model": ..., "messages": [{"role", "content"}, ...]}, answer text in
choices[0].message.content. The API key comes from the T2N_LLM_API_KEY
environment variable only; it is never read from configuration files and
never logged.
"""

from __future__ import annotations

import logging
import os
import time

import requests

from .base import (
    AdapterConfig,
    AdapterExchange,
    AuthFailure,
    BackendTimeout,
    BackendUnreachable,
    ClarifyOutcome,
    MalformedModelOutput,
    Outcome,
    RejectOutcome,
    ScsOutcome,
    self_check_scs,
)

API_KEY_ENV = "T2N_LLM_API_KEY"

log = logging.getLogger("text2net.adapter.http")


def _build_messages(config: AdapterConfig, exchange: AdapterExchange) -> list[dict]:
    messages = [{"role": "system", "content": config.system_prompt}]
    messages.append({"role": "user", "content": exchange.scenario_text})
    for role, text in exchange.history:
        wire_role = "user" if role == "user" else "assistant"
        messages.append({"role": wire_role, "content": text})
    return messages


def http_complete(config: AdapterConfig, messages: list[dict]) -> str:
    """One chat completion with retry/backoff on 5xx and timeouts."""
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {"messages": messages}
    if config.model_name:
        payload["model"] = config.model_name

    last_error: Exception | None = None
    for attempt in range(config.max_retries + 1):
        if attempt:
            delay = config.backoff_base * (2 ** (attempt - 1))
            log.info("retrying backend call (attempt %d) after %.2fs", attempt + 1, delay)
            time.sleep(delay)
        try:
            response = requests.post(
                config.endpoint_url, json=payload, headers=headers, timeout=config.timeout
            )
        except requests.Timeout as exc:
            last_error = BackendTimeout(str(exc))
            continue
        except requests.ConnectionError as exc:
            last_error = BackendUnreachable(str(exc))
            continue
        if response.status_code in (401, 403):
            raise AuthFailure(f"backend rejected credentials ({response.status_code})")
        if response.status_code >= 500:
            last_error = BackendUnreachable(f"backend returned {response.status_code}")
            continue
        if response.status_code >= 400:
            raise BackendUnreachable(
                f"backend returned {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError) as exc:
            raise MalformedModelOutput(f"unexpected response shape: {exc}") from exc
    raise last_error  # type: ignore[misc]


def parse_model_reply(raw: str) -> Outcome | None:
    """Map raw assistant text to an outcome; None when unrecognizable."""
    text = raw.strip()
    if text.startswith("```"):
        text = text.strip("`").strip()
        if text.lower().startswith("text"):
            text = text[4:].strip()
    if not text:
        return None
    lines = [line for line in text.splitlines() if line.strip()]
    if lines and lines[-1].strip() == "Understood":
        scs_text = "\n".join(lines[:-1]) + "\n"
        return ScsOutcome(scs_text=scs_text)
    if text.upper().startswith("REJECT:"):
        return RejectOutcome(reason=text[len("REJECT:"):].strip())
    if "?" in text:
        return ClarifyOutcome(question=text)
    return None


def http_generate(config: AdapterConfig, exchange: AdapterExchange) -> Outcome:
    """Full exchange with one repair round for unparsable SCS."""
    messages = _build_messages(config, exchange)
    raw = http_complete(config, messages)
    outcome = parse_model_reply(raw)
    problem = None
    if isinstance(outcome, ScsOutcome):
        try:
            self_check_scs(outcome.scs_text)
            return outcome
        except MalformedModelOutput as exc:
            problem = str(exc)
    elif outcome is not None:
        return outcome
    else:
        problem = "reply was neither SCS + 'Understood', a question, nor REJECT"

    log.info("model output malformed (%s); asking for a repair", problem)
    messages.append({"role": "assistant", "content": raw})
    messages.append(
        {
            "role": "user",
            "content": (
                "Your previous reply could not be used: "
                f"{problem}. Reply again following the output rules exactly."
            ),
        }
    )
    raw = http_complete(config, messages)
    outcome = parse_model_reply(raw)
    if isinstance(outcome, ScsOutcome):
        self_check_scs(outcome.scs_text)
        return outcome
    if outcome is not None:
        return outcome
    raise MalformedModelOutput("backend reply unusable after repair attempt")
