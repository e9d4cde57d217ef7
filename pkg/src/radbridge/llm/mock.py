"""Deterministic mock backends.

Echo returns the user content; TemplateRefine understands the prompt-bundle
conventions well enough to emit a plausible revised report; Scripted replays
canned responses from a fixture. All outputs are pure functions of the turns
and fixture state, which makes full pipeline runs reproducible offline.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from ..errors import DomainError, FixtureExhaustedError
from ..types import OBSERVATIONS, ChatTurn
from .client import CompletionResult

SUPPRESS_MARKER = "but without mentioning"
NO_FINDING_REPORT = "The lungs are clear. There is no acute cardiopulmonary process."
NETWORK_CREDIT_SENTENCE = (
    "Network A's diagnosis prediction is consistent with these findings."
)


class MockBehavior(Enum):
    ECHO = "echo"
    TEMPLATE_REFINE = "templateRefine"
    SCRIPTED = "scripted"

    @classmethod
    def from_string(cls, value: str) -> "MockBehavior":
        for member in cls:
            if member.value.lower() == value.lower():
                return member
        raise DomainError(f"unknown mock behavior {value!r}")


class ScriptedSource:
    """Cursor over canned responses; exhausting it is an error, not a loop."""

    def __init__(self, responses: Sequence[str]):
        self._responses = list(responses)
        self._cursor = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedSource":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
            raise DomainError(f"script file {path} must hold a JSON array of strings")
        return cls(data)

    def next(self) -> str:
        if self._cursor >= len(self._responses):
            raise FixtureExhaustedError(
                f"scripted mock exhausted after {len(self._responses)} response(s)"
            )
        response = self._responses[self._cursor]
        self._cursor += 1
        return response

    @property
    def remaining(self) -> int:
        return len(self._responses) - self._cursor


def _last_user_content(turns: Sequence[ChatTurn]) -> str:
    for turn in reversed(turns):
        if turn.role == "user":
            return turn.content
    raise DomainError("mock backend needs at least one user turn")


def _extract_network_a(full_text: str) -> str:
    """Pull the Network A description out of a rendered prompt bundle."""
    lines = full_text.splitlines()
    collected: list[str] = []
    inside = False
    for line in lines:
        if line.startswith("Network A:"):
            inside = True
            collected.append(line[len("Network A:"):].strip())
            continue
        if inside:
            if line.startswith(("Network B:", "Network C:", "Revise the report")):
                break
            collected.append(line)
    return "\n".join(collected).strip()


def _join_names(names: Sequence[str]) -> str:
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def _template_refine(prompt_text: str) -> str:
    suppress = SUPPRESS_MARKER in prompt_text
    description = _extract_network_a(prompt_text)
    haystack = description.lower()
    mentioned = [obs for obs in OBSERVATIONS if obs.display_name.lower() in haystack]
    if mentioned:
        names = [obs.display_name.lower() for obs in mentioned]
        sentences = [f"The exam demonstrates {_join_names(names)}."]
    else:
        sentences = [NO_FINDING_REPORT]
    if not suppress:
        sentences.append(NETWORK_CREDIT_SENTENCE)
    return " ".join(sentences)


def mock_complete(
    turns: Sequence[ChatTurn],
    behavior: MockBehavior,
    *,
    script: Optional[ScriptedSource] = None,
    backend_id: str = "mock",
) -> CompletionResult:
    """Produce a deterministic completion for the given turns."""
    if behavior is MockBehavior.ECHO:
        text = _last_user_content(turns)
    elif behavior is MockBehavior.TEMPLATE_REFINE:
        text = _template_refine(_last_user_content(turns))
    elif behavior is MockBehavior.SCRIPTED:
        if script is None:
            raise DomainError("scripted behavior requires a ScriptedSource")
        text = script.next()
    else:  # pragma: no cover - closed enum
        raise DomainError(f"unhandled behavior {behavior!r}")
    return CompletionResult(
        text=text,
        finish_reason="stop",
        prompt_tokens=0,
        completion_tokens=0,
        latency_ms=0.0,
        backend_id=backend_id,
    )


class MockBackend:
    """Registry adapter with a call counter (idempotency tests rely on it)."""

    def __init__(
        self,
        behavior: MockBehavior,
        *,
        script: Optional[ScriptedSource] = None,
        backend_id: str = "mock",
    ):
        if behavior is MockBehavior.SCRIPTED and script is None:
            raise DomainError("scripted backend requires a script")
        self.behavior = behavior
        self.backend_id = backend_id
        self._script = script
        self.calls = 0

    def complete(self, turns: Sequence[ChatTurn]) -> CompletionResult:
        self.calls += 1
        return mock_complete(
            turns, self.behavior, script=self._script, backend_id=self.backend_id
        )
