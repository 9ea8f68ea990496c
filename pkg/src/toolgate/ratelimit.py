"""Per-agent sliding-window rate limiting and block-based auto-revocation."""

from __future__ import annotations

import threading
import time
from collections import deque
from typing import Callable


class SlidingWindowLimiter:
    """Admit at most `limit` requests per agent in the trailing window.

    A request at time t is allowed iff fewer than `limit` previously
    allowed requests fall in (t - window, t]; only allowed requests
    consume window slots.
    """

    def __init__(
        self,
        limit: int = 100,
        window_s: float = 60.0,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.limit = limit
        self.window_s = window_s
        self._clock = clock
        self._lock = threading.Lock()
        self._windows: dict[str, deque[float]] = {}

    def allow(self, agent_id: str) -> bool:
        now = self._clock()
        with self._lock:
            window = self._windows.setdefault(agent_id, deque())
            cutoff = now - self.window_s
            while window and window[0] <= cutoff:
                window.popleft()
            if len(window) >= self.limit:
                return False
            window.append(now)
            return True


class RevocationTracker:
    """Revoke agents that accumulate repeated blocks in a short window.

    The default trips after 5 block decisions within 10 minutes; both
    knobs are configuration, not protocol. Revocation is sticky until
    explicitly lifted.
    """

    def __init__(
        self,
        threshold: int = 5,
        window_s: float = 600.0,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.threshold = threshold
        self.window_s = window_s
        self._clock = clock
        self._lock = threading.Lock()
        self._blocks: dict[str, deque[float]] = {}
        self._revoked: set[str] = set()

    def is_revoked(self, agent_id: str) -> bool:
        with self._lock:
            return agent_id in self._revoked

    def record_block(self, agent_id: str) -> bool:
        """Note a block decision; returns True if this trips revocation."""
        now = self._clock()
        with self._lock:
            if agent_id in self._revoked:
                return False
            window = self._blocks.setdefault(agent_id, deque())
            cutoff = now - self.window_s
            while window and window[0] <= cutoff:
                window.popleft()
            window.append(now)
            if len(window) >= self.threshold:
                self._revoked.add(agent_id)
                return True
            return False

    def revoke(self, agent_id: str) -> None:
        with self._lock:
            self._revoked.add(agent_id)

    def unrevoke(self, agent_id: str) -> None:
        with self._lock:
            self._revoked.discard(agent_id)
            self._blocks.pop(agent_id, None)

    def revoked_agents(self) -> list[str]:
        with self._lock:
            return sorted(self._revoked)
