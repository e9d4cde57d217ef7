"""Sliding-window admission control for rate-limited backends.

Guarantees that for every instant t, the number of requests admitted inside
(t - window, t] never exceeds the configured limit. Excess callers either
wait for the next free slot or fail fast, per their wait budget.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from typing import Callable, Optional

from ..errors import DomainError, ThrottledError


class SlidingWindowThrottle:
    def __init__(
        self,
        limit: int,
        window_seconds: float = 3600.0,
        *,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        if limit < 1:
            raise DomainError(f"throttle limit must be >= 1, got {limit}")
        if window_seconds <= 0:
            raise DomainError(f"window must be positive, got {window_seconds}")
        self.limit = limit
        self.window_seconds = window_seconds
        self._clock = clock
        self._sleeper = sleeper
        self._admitted: deque[float] = deque()
        self._lock = threading.Lock()

    def _prune(self, now: float) -> None:
        # Expiry is compared as `a + window <= now` everywhere (never the
        # algebraically equal `a <= now - window`): mixing the two float
        # directions disagrees at exact-boundary instants.
        while self._admitted and self._admitted[0] + self.window_seconds <= now:
            self._admitted.popleft()

    def _wait_needed(self, now: float) -> float:
        """Seconds until an admission slot opens; 0 when one is free now."""
        self._prune(now)
        if len(self._admitted) < self.limit:
            return 0.0
        return self._admitted[0] + self.window_seconds - now

    def try_acquire(self) -> bool:
        """Fail-fast policy: admit immediately or not at all."""
        with self._lock:
            now = self._clock()
            if self._wait_needed(now) > 0:
                return False
            self._admitted.append(now)
            return True

    def acquire(self, max_wait: Optional[float] = None) -> float:
        """Wait policy: block until admitted; returns the total time waited.

        A finite ``max_wait`` bounds the wait; exceeding it raises
        ThrottledError without consuming a slot.
        """
        waited = 0.0
        while True:
            with self._lock:
                now = self._clock()
                wait = self._wait_needed(now)
                if wait <= 0:
                    self._admitted.append(now)
                    return waited
            if max_wait is not None and waited + wait > max_wait:
                raise ThrottledError(
                    f"admission would take {waited + wait:.1f}s, "
                    f"over the {max_wait:.1f}s wait budget"
                )
            self._sleeper(wait)
            waited += wait

    @property
    def admitted_count(self) -> int:
        with self._lock:
            self._prune(self._clock())
            return len(self._admitted)


class ThrottleRegistry:
    """One throttle per backend id; backends without a limit are unthrottled."""

    def __init__(
        self,
        *,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self._clock = clock
        self._sleeper = sleeper
        self._throttles: dict[str, SlidingWindowThrottle] = {}
        self._lock = threading.Lock()

    def register(self, backend_id: str, rate_limit: Optional[int]) -> None:
        if rate_limit is None:
            return
        with self._lock:
            if backend_id not in self._throttles:
                self._throttles[backend_id] = SlidingWindowThrottle(
                    rate_limit, clock=self._clock, sleeper=self._sleeper
                )

    def get(self, backend_id: str) -> Optional[SlidingWindowThrottle]:
        with self._lock:
            return self._throttles.get(backend_id)

    def admit(self, backend_id: str, max_wait: Optional[float] = None) -> float:
        throttle = self.get(backend_id)
        if throttle is None:
            return 0.0
        return throttle.acquire(max_wait)
