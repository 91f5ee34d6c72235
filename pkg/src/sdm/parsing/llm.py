"""LLM parse engine: OpenAI-style chat client plus response handling.

The client posts the chain-of-thought prompt, pulls the first balanced
JSON object out of the (possibly prose-wrapped) reply, and validates it.
A schema failure earns one repair round trip quoting the violations; a
second failure, or any transport error, becomes a failed ParseResult.
"""
from __future__ import annotations

import json
import threading
from typing import Optional

import httpx

from .grammar import ParseResult
from .prompt import build_cot_prompt
from .schema import StructuredCommand, validate_schema


class LlmConfigError(ValueError):
    pass


def extract_json_object(text: str) -> Optional[dict]:
    """First balanced {...} block that parses as JSON, or None."""
    depth = 0
    start = None
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(text[start:i + 1])
                    except json.JSONDecodeError:
                        start = None
                        continue
                    if isinstance(obj, dict):
                        return obj
                    start = None
    return None


class LlmClient:
    """Minimal chat-completions client with an in-flight request cap."""

    def __init__(self, base_url: str, model: str, api_key: str = "",
                 timeout: float = 30.0, max_in_flight: int = 4):
        if not base_url:
            raise LlmConfigError("LLM endpoint not configured")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self._gate = threading.Semaphore(max_in_flight)

    def complete(self, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        with self._gate:
            resp = httpx.post(f"{self.base_url}/v1/chat/completions",
                              json=body, headers=headers, timeout=self.timeout)
        resp.raise_for_status()
        payload = resp.json()
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise httpx.HTTPError(f"malformed completion payload: {exc}")


_REPAIR = """\
Your previous reply failed schema validation:
{violations}
Reply again with ONLY the corrected JSON object.
"""


def parse_with_llm(text: str, client: LlmClient,
                   template_version: str = "v1") -> ParseResult:
    """Prompt, extract, validate; one repair retry on schema violations."""
    prompt = build_cot_prompt(text, template_version)
    raw_history: list[str] = []
    violations: list[str] = []
    for attempt in range(2):
        ask = prompt if attempt == 0 else (
            prompt + "\n" + _REPAIR.format(violations="\n".join(violations)))
        try:
            reply = client.complete(ask)
        except httpx.HTTPError as exc:
            return ParseResult(None, "llm", raw="\n---\n".join(raw_history),
                               failure=f"transport failure: {exc}")
        raw_history.append(reply)
        obj = extract_json_object(reply)
        if obj is None:
            violations = ["no JSON object found in reply"]
            continue
        checked = validate_schema(obj)
        if isinstance(checked, StructuredCommand):
            return ParseResult(checked, "llm", raw="\n---\n".join(raw_history))
        violations = checked
    return ParseResult(None, "llm", raw="\n---\n".join(raw_history),
                       failure="schema-invalid after retry: " + "; ".join(violations))
