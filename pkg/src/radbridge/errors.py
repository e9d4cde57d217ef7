"""Exception taxonomy.

Callers dispatch on class; each backend-facing error also carries a stable
``kind`` string so the error category survives JSON serialization.
"""


class RadbridgeError(Exception):
    kind = "error"


class DomainError(RadbridgeError, ValueError):
    """A value violates a domain invariant (bad score, malformed record, ...)."""

    kind = "domain"


class NotFoundError(RadbridgeError):
    kind = "not_found"


class ConflictError(RadbridgeError):
    """Duplicate id for a record kind that requires uniqueness."""

    kind = "conflict"


class InsufficientPoolError(DomainError):
    """A sampling category has fewer eligible cases than requested."""

    kind = "insufficient_pool"

    def __init__(self, category: str, available: int, requested: int):
        self.category = category
        self.available = available
        self.requested = requested
        super().__init__(
            f"category {category!r} has {available} eligible case(s), "
            f"{requested} requested"
        )


class BackendError(RadbridgeError):
    """Base for chat-completion backend failures."""

    kind = "backend"


class TransportError(BackendError):
    """Network-level failure or 5xx; safe to retry."""

    kind = "transport"


class RateLimitError(BackendError):
    kind = "rate_limit"

    def __init__(self, message: str, retry_after: float | None = None):
        self.retry_after = retry_after
        super().__init__(message)


class PermanentError(BackendError):
    """HTTP 4xx other than 429; retrying will not help."""

    kind = "permanent"


class ProtocolError(BackendError):
    """The backend answered with a body we cannot interpret."""

    kind = "protocol"


class ThrottledError(BackendError):
    """Local admission control refused the request within the wait budget."""

    kind = "throttled"


class FixtureExhaustedError(BackendError):
    """A scripted mock ran out of canned responses."""

    kind = "fixture_exhausted"
