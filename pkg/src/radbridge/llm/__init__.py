"""Pluggable chat-completion backends: a real OpenAI-compatible HTTP client
and deterministic mocks for tests and offline evaluation."""

from ..types import ChatTurn
from .client import (
    BackendConfig,
    CompletionResult,
    HttpBackend,
    build_request_body,
    complete,
    parse_completion_payload,
)
from .mock import MockBackend, MockBehavior, ScriptedSource, mock_complete
from .throttle import SlidingWindowThrottle, ThrottleRegistry

__all__ = [
    "BackendConfig",
    "ChatTurn",
    "CompletionResult",
    "HttpBackend",
    "MockBackend",
    "MockBehavior",
    "ScriptedSource",
    "SlidingWindowThrottle",
    "ThrottleRegistry",
    "build_request_body",
    "complete",
    "mock_complete",
    "parse_completion_payload",
]
