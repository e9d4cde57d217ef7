"""OpenAI-compatible chat-completion HTTP client.

The outgoing request body carries exactly four fields: model, messages,
max_tokens, temperature. Retries use exponential backoff with jitter, at
most five attempts, and only for transport/server/rate-limit failures; the
serialized body is built once so a retry can never send different content.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import requests

from ..errors import (
    DomainError,
    PermanentError,
    ProtocolError,
    RateLimitError,
    TransportError,
)
from ..types import ChatTurn

# transport(url, headers, body, timeout) -> (status, response headers, response body)
Transport = Callable[[str, Mapping[str, str], bytes, float], tuple[int, Mapping[str, str], bytes]]

MAX_ATTEMPTS = 5
BACKOFF_BASE_SECONDS = 0.5
JITTER_FRACTION = 0.25


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for one chat-completion backend.

    ``api_key_ref`` names an environment variable; the key itself is never
    stored in configuration.
    """

    backend_id: str
    endpoint_url: str
    api_key_ref: str
    model: str
    max_tokens: int = 1024
    temperature: float = 0.5
    request_timeout: float = 60.0
    rate_limit: Optional[int] = None

    def __post_init__(self):
        if not self.backend_id:
            raise DomainError("backendId must be non-empty")
        if self.max_tokens < 1:
            raise DomainError(f"maxTokens must be >= 1, got {self.max_tokens}")
        if self.temperature < 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature}")
        if self.rate_limit is not None and self.rate_limit < 1:
            raise DomainError(f"rateLimit must be >= 1, got {self.rate_limit}")

    def to_json_dict(self) -> dict:
        data = {
            "backendId": self.backend_id,
            "endpointUrl": self.endpoint_url,
            "apiKeyRef": self.api_key_ref,
            "model": self.model,
            "maxTokens": self.max_tokens,
            "temperature": self.temperature,
            "requestTimeout": self.request_timeout,
        }
        if self.rate_limit is not None:
            data["rateLimit"] = self.rate_limit
        return data

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "BackendConfig":
        try:
            return cls(
                backend_id=data["backendId"],
                endpoint_url=data["endpointUrl"],
                api_key_ref=data["apiKeyRef"],
                model=data["model"],
                max_tokens=data.get("maxTokens", 1024),
                temperature=data.get("temperature", 0.5),
                request_timeout=data.get("requestTimeout", 60.0),
                rate_limit=data.get("rateLimit"),
            )
        except KeyError as exc:
            raise DomainError(f"backend config missing field {exc}") from None


@dataclass(frozen=True)
class CompletionResult:
    text: str
    finish_reason: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float
    backend_id: str
    attempts: int = 1
    raw_payload: str = ""  # verbatim response body; mocks echo their text

    def __post_init__(self):
        if self.latency_ms < 0:
            raise DomainError(f"latency must be >= 0, got {self.latency_ms}")
        if not self.raw_payload:
            object.__setattr__(self, "raw_payload", self.text)

    def to_json_dict(self) -> dict:
        return {
            "text": self.text,
            "finishReason": self.finish_reason,
            "promptTokens": self.prompt_tokens,
            "completionTokens": self.completion_tokens,
            "latencyMs": self.latency_ms,
            "backendId": self.backend_id,
            "attempts": self.attempts,
        }


def validate_turns(turns: Sequence[ChatTurn]) -> None:
    if not turns:
        raise DomainError("turns must be non-empty")
    if turns[-1].role != "user":
        raise DomainError(f"last turn must be a user turn, got {turns[-1].role!r}")


def build_request_body(config: BackendConfig, turns: Sequence[ChatTurn]) -> dict:
    """Exactly the four wire fields, messages mirroring the turns in order."""
    return {
        "model": config.model,
        "messages": [{"role": t.role, "content": t.content} for t in turns],
        "max_tokens": config.max_tokens,
        "temperature": config.temperature,
    }


def parse_request_body(body: bytes) -> list[ChatTurn]:
    """Inverse of build_request_body for the messages field (wire fidelity)."""
    try:
        payload = json.loads(body.decode("utf-8"))
        return [ChatTurn(role=m["role"], content=m["content"]) for m in payload["messages"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ProtocolError(f"unparseable request body: {exc}") from exc


def parse_completion_payload(raw: bytes) -> tuple[str, str, int, int]:
    """Extract (text, finish_reason, prompt_tokens, completion_tokens).

    Reads choices[0].message.content with a fallback to choices[0].text;
    token counts default to 0 when the backend omits usage.
    """
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"response body is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ProtocolError(f"response body is not an object: {type(payload).__name__}")
    choices = payload.get("choices")
    if not isinstance(choices, list) or not choices:
        raise ProtocolError("response has no choices")
    first = choices[0]
    if not isinstance(first, dict):
        raise ProtocolError("choices[0] is not an object")
    message = first.get("message")
    if isinstance(message, dict) and isinstance(message.get("content"), str):
        text = message["content"]
    elif isinstance(first.get("text"), str):
        text = first["text"]
    else:
        raise ProtocolError("choices[0] carries neither message.content nor text")
    finish_reason = first.get("finish_reason") or ""
    usage = payload.get("usage") or {}
    prompt_tokens = int(usage.get("prompt_tokens") or 0)
    completion_tokens = int(usage.get("completion_tokens") or 0)
    return text, finish_reason, prompt_tokens, completion_tokens


def _requests_transport(
    url: str, headers: Mapping[str, str], body: bytes, timeout: float
) -> tuple[int, Mapping[str, str], bytes]:
    try:
        response = requests.post(url, headers=dict(headers), data=body, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"transport failure: {exc}") from exc
    return response.status_code, response.headers, response.content


def _retry_after_seconds(headers: Mapping[str, str]) -> Optional[float]:
    for key, value in headers.items():
        if key.lower() == "retry-after":
            try:
                return max(0.0, float(value))
            except ValueError:
                return None
    return None


def complete(
    config: BackendConfig,
    turns: Sequence[ChatTurn],
    *,
    transport: Optional[Transport] = None,
    sleeper: Callable[[float], None] = time.sleep,
    rng: Optional[random.Random] = None,
    max_attempts: int = MAX_ATTEMPTS,
) -> CompletionResult:
    """Send the turns to the backend and return its completion.

    Error kinds: network failures and 5xx raise TransportError after the
    retry budget; 429 raises RateLimitError (honoring Retry-After between
    attempts); other 4xx raise PermanentError immediately; malformed bodies
    raise ProtocolError.
    """
    validate_turns(turns)
    rng = rng if rng is not None else random.Random()
    api_key = os.environ.get(config.api_key_ref)
    if not api_key:
        raise PermanentError(
            f"environment variable {config.api_key_ref!r} is not set; "
            "refusing to call the backend without credentials"
        )
    headers = {
        "Authorization": f"Bearer {api_key}",
        "Content-Type": "application/json",
    }
    # Serialized once: retries always resend identical bytes.
    body = json.dumps(build_request_body(config, turns), ensure_ascii=False).encode("utf-8")
    send = transport if transport is not None else _requests_transport

    started = time.perf_counter()
    last_error: Exception = TransportError("no attempt made")
    for attempt in range(1, max_attempts + 1):
        retry_after: Optional[float] = None
        try:
            status, response_headers, raw = send(
                config.endpoint_url, headers, body, config.request_timeout
            )
        except TransportError as exc:
            last_error = exc
        else:
            if status == 200:
                text, finish_reason, prompt_tokens, completion_tokens = (
                    parse_completion_payload(raw)
                )
                latency_ms = (time.perf_counter() - started) * 1000.0
                return CompletionResult(
                    text=text,
                    finish_reason=finish_reason,
                    prompt_tokens=prompt_tokens,
                    completion_tokens=completion_tokens,
                    latency_ms=latency_ms,
                    backend_id=config.backend_id,
                    attempts=attempt,
                    raw_payload=raw.decode("utf-8", errors="replace"),
                )
            if status == 429:
                retry_after = _retry_after_seconds(response_headers)
                last_error = RateLimitError(
                    f"backend {config.backend_id!r} rate limited (HTTP 429)",
                    retry_after=retry_after,
                )
            elif 400 <= status < 500:
                raise PermanentError(
                    f"backend {config.backend_id!r} rejected the request "
                    f"(HTTP {status}): {raw[:200]!r}"
                )
            elif status >= 500:
                last_error = TransportError(
                    f"backend {config.backend_id!r} server error (HTTP {status})"
                )
            else:
                raise ProtocolError(
                    f"unexpected HTTP status {status} from backend "
                    f"{config.backend_id!r}"
                )
        if attempt == max_attempts:
            raise last_error
        delay = BACKOFF_BASE_SECONDS * (2 ** (attempt - 1))
        delay += rng.uniform(0, delay * JITTER_FRACTION)
        if retry_after is not None:
            delay = max(delay, retry_after)
        sleeper(delay)
    raise last_error


class HttpBackend:
    """Registry adapter binding a BackendConfig to the module-level complete()."""

    def __init__(
        self,
        config: BackendConfig,
        *,
        transport: Optional[Transport] = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.backend_id = config.backend_id
        self._transport = transport
        self._sleeper = sleeper
        self.calls = 0

    def complete(self, turns: Sequence[ChatTurn]) -> CompletionResult:
        self.calls += 1
        return complete(
            self.config, turns, transport=self._transport, sleeper=self._sleeper
        )
