"""Held tool calls awaiting a human allow/block decision.

Entries expire after five minutes without resolution and then poll as
block (fail closed). Status transitions are atomic compare-and-set under
one lock, so concurrent reviewers resolve with exactly one winner.
"""

from __future__ import annotations

import enum
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable

DEFAULT_TIMEOUT_S = 300.0


class ReviewStatus(str, enum.Enum):
    PENDING = "pending"
    ALLOWED = "allowed"
    BLOCKED = "blocked"
    EXPIRED = "expired"


class UnknownReview(KeyError):
    pass


class ReviewConflict(RuntimeError):
    """The entry already reached a terminal state; first decision wins."""

    def __init__(self, entry: "PendingReview") -> None:
        self.entry = entry
        super().__init__(f"review {entry.trace_id} already {entry.status.value}")


@dataclass(frozen=True)
class PendingReview:
    trace_id: str
    created_at: float
    request: dict[str, Any]
    risk_signals: list[dict[str, Any]] = field(default_factory=list)
    status: ReviewStatus = ReviewStatus.PENDING
    reviewer: str | None = None
    resolved_at: float | None = None

    @property
    def approval_url(self) -> str:
        return f"/cockpit/review/{self.trace_id}"

    def to_wire(self) -> dict[str, Any]:
        return {
            "trace_id": self.trace_id,
            "created_at": self.created_at,
            "request": self.request,
            "risk_signals": self.risk_signals,
            "status": self.status.value,
            "reviewer": self.reviewer,
            "resolved_at": self.resolved_at,
            "approval_url": self.approval_url,
        }


class ApprovalQueue:
    """In-memory pending-review queue with fail-closed expiry."""

    def __init__(
        self,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self.timeout_s = timeout_s
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, PendingReview] = {}

    def enqueue(
        self,
        trace_id: str,
        request: dict[str, Any],
        signals: list[dict[str, Any]],
    ) -> PendingReview:
        """Queue a call for review; re-enqueueing the same id is a no-op."""
        with self._lock:
            existing = self._entries.get(trace_id)
            if existing is not None:
                return existing
            entry = PendingReview(
                trace_id=trace_id,
                created_at=self._clock(),
                request=request,
                risk_signals=signals,
            )
            self._entries[trace_id] = entry
            return entry

    def _expire_locked(self, entry: PendingReview) -> PendingReview:
        if (
            entry.status is ReviewStatus.PENDING
            and self._clock() - entry.created_at > self.timeout_s
        ):
            entry = replace(entry, status=ReviewStatus.EXPIRED, resolved_at=self._clock())
            self._entries[entry.trace_id] = entry
        return entry

    def resolve(self, trace_id: str, decision: str, reviewer: str) -> PendingReview:
        """Apply a reviewer decision; raises on unknown id or a lost race."""
        if decision not in ("allow", "block"):
            raise ValueError(f"decision must be allow or block, got {decision!r}")
        with self._lock:
            entry = self._entries.get(trace_id)
            if entry is None:
                raise UnknownReview(trace_id)
            entry = self._expire_locked(entry)
            if entry.status is not ReviewStatus.PENDING:
                raise ReviewConflict(entry)
            status = ReviewStatus.ALLOWED if decision == "allow" else ReviewStatus.BLOCKED
            entry = replace(entry, status=status, reviewer=reviewer, resolved_at=self._clock())
            self._entries[trace_id] = entry
            return entry

    def poll(self, trace_id: str) -> str:
        """Current fate of a held call: "pending", "allow" or "block".

        Expired entries poll as block; terminal answers never change.
        """
        with self._lock:
            entry = self._entries.get(trace_id)
            if entry is None:
                raise UnknownReview(trace_id)
            entry = self._expire_locked(entry)
        if entry.status is ReviewStatus.PENDING:
            return "pending"
        if entry.status is ReviewStatus.ALLOWED:
            return "allow"
        return "block"

    def get(self, trace_id: str) -> PendingReview:
        with self._lock:
            entry = self._entries.get(trace_id)
            if entry is None:
                raise UnknownReview(trace_id)
            return self._expire_locked(entry)

    def listing(self, status: str | None = "pending") -> list[PendingReview]:
        """Entries in FIFO order by creation time, optionally filtered."""
        with self._lock:
            entries = [self._expire_locked(e) for e in self._entries.values()]
        if status is not None:
            entries = [e for e in entries if e.status.value == status]
        return sorted(entries, key=lambda e: (e.created_at, e.trace_id))
