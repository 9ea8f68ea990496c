"""Append-only, tamper-evident trace store.

Every record commits to its predecessor through a SHA-256 hash over a
canonical payload and is signed with the acting agent's Ed25519 key, so
any post hoc edit of a stored trace is detectable offline.

Canonical serialization is the cross-implementation contract::

    payload = {trace_id, agent_id, tool_call{tool_name, arguments,
               session_id}, timestamp, previous_hash}

encoded as UTF-8 JSON with keys sorted lexicographically at every level,
no insignificant whitespace, and numbers in shortest round-trip decimal
form. ``integrity_hash`` is the hex SHA-256 of those bytes; the
signature covers the ASCII hex digest. The first record links to a
genesis constant of 64 zero hex characters.

``decision`` / ``risk_level`` / ``risk_signals`` / ``category`` are
stored alongside each record but are deliberately outside the hashed
payload, mirroring the wire contract; that gap is a documented
tamper-evidence limitation of the payload field list.

Persistence is a single SQLite file: atomic single-writer appends with a
monotone integer rowid as chain order, trivially exportable offline.
"""

from __future__ import annotations

import base64
import enum
import json
import sqlite3
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)
import hashlib

from .model import Category, Decision, RiskLevel, RiskSignal

GENESIS_HASH = "0" * 64


class AuditUnavailable(RuntimeError):
    """The audit layer cannot accept an append; callers must fail closed."""


class FailureKind(str, enum.Enum):
    HASH_MISMATCH = "hash_mismatch"
    CHAIN_BREAK = "chain_break"
    BAD_SIGNATURE = "bad_signature"
    UNKNOWN_KEY = "unknown_key"


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    first_bad_index: int | None = None
    failure_kind: FailureKind | None = None

    def to_wire(self) -> dict:
        wire: dict[str, Any] = {"valid": self.valid}
        if not self.valid:
            wire["first_bad_index"] = self.first_bad_index
            wire["failure_kind"] = self.failure_kind.value if self.failure_kind else None
        return wire


@dataclass(frozen=True)
class TraceRecord:
    trace_id: str
    agent_id: str
    tool_name: str
    arguments: Any
    session_id: str | None
    timestamp: int  # UTC milliseconds
    decision: Decision
    risk_level: RiskLevel
    risk_signals: tuple[RiskSignal, ...]
    category: Category
    previous_hash: str
    integrity_hash: str
    signature: str  # base64 of the 64-byte Ed25519 signature
    chain_index: int = 0
    latency_ms: float | None = None
    reviewer: str | None = None
    parent_trace_id: str | None = None

    def to_wire(self) -> dict:
        wire: dict[str, Any] = {
            "trace_id": self.trace_id,
            "agent_id": self.agent_id,
            "tool_call": {
                "tool_name": self.tool_name,
                "arguments": self.arguments,
                "session_id": self.session_id,
            },
            "timestamp": self.timestamp,
            "decision": self.decision.value,
            "risk_level": self.risk_level.value,
            "risk_signals": [s.to_wire() for s in self.risk_signals],
            "category": self.category.value,
            "previous_hash": self.previous_hash,
            "integrity_hash": self.integrity_hash,
            "signature": self.signature,
            "chain_index": self.chain_index,
        }
        if self.latency_ms is not None:
            wire["latency_ms"] = self.latency_ms
        if self.reviewer is not None:
            wire["reviewer"] = self.reviewer
        if self.parent_trace_id is not None:
            wire["parent_trace_id"] = self.parent_trace_id
        return wire


def canonical_payload(
    trace_id: str,
    agent_id: str,
    tool_name: str,
    arguments: Any,
    session_id: str | None,
    timestamp: int,
    previous_hash: str,
) -> bytes:
    payload = {
        "trace_id": trace_id,
        "agent_id": agent_id,
        "tool_call": {
            "tool_name": tool_name,
            "arguments": arguments,
            "session_id": session_id,
        },
        "timestamp": timestamp,
        "previous_hash": previous_hash,
    }
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def compute_integrity_hash(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def new_trace_id() -> str:
    return "trc_" + uuid.uuid4().hex[:12]


# --- offline verification -----------------------------------------------------


def _as_public_key(value: Any) -> Ed25519PublicKey:
    if isinstance(value, Ed25519PublicKey):
        return value
    if isinstance(value, bytes):
        return Ed25519PublicKey.from_public_bytes(value)
    if isinstance(value, str):
        return Ed25519PublicKey.from_public_bytes(base64.b64decode(value))
    raise TypeError(f"unsupported public key form: {type(value)!r}")


def verify_chain(records: Iterable[Mapping[str, Any]], keys: Mapping[str, Any]) -> VerificationReport:
    """Recompute every hash, linkage, and signature in storage order.

    ``records`` are wire-shaped dicts (as exported); ``keys`` maps
    agent_id to an Ed25519 public key (object, raw bytes, or base64).
    Returns the first failing index and kind, or a valid report.
    """
    public_keys: dict[str, Ed25519PublicKey] = {}
    expected_prev = GENESIS_HASH
    for index, record in enumerate(records):
        try:
            tool_call = record["tool_call"]
            payload = canonical_payload(
                record["trace_id"],
                record["agent_id"],
                tool_call["tool_name"],
                tool_call["arguments"],
                tool_call.get("session_id"),
                record["timestamp"],
                record["previous_hash"],
            )
            stored_hash = record["integrity_hash"]
            signature = base64.b64decode(record["signature"])
            agent_id = record["agent_id"]
        except (KeyError, TypeError, ValueError):
            return VerificationReport(False, index, FailureKind.HASH_MISMATCH)

        if record["previous_hash"] != expected_prev:
            return VerificationReport(False, index, FailureKind.CHAIN_BREAK)
        if compute_integrity_hash(payload) != stored_hash:
            return VerificationReport(False, index, FailureKind.HASH_MISMATCH)

        if agent_id not in public_keys:
            raw = keys.get(agent_id)
            if raw is None:
                return VerificationReport(False, index, FailureKind.UNKNOWN_KEY)
            try:
                public_keys[agent_id] = _as_public_key(raw)
            except (ValueError, TypeError):
                return VerificationReport(False, index, FailureKind.UNKNOWN_KEY)
        try:
            public_keys[agent_id].verify(signature, stored_hash.encode("ascii"))
        except InvalidSignature:
            return VerificationReport(False, index, FailureKind.BAD_SIGNATURE)

        expected_prev = stored_hash
    return VerificationReport(True)


# --- persistent store ----------------------------------------------------------

_SCHEMA = """
CREATE TABLE IF NOT EXISTS traces (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    trace_id TEXT NOT NULL UNIQUE,
    agent_id TEXT NOT NULL,
    tool_name TEXT NOT NULL,
    arguments_json TEXT NOT NULL,
    session_id TEXT,
    timestamp INTEGER NOT NULL,
    decision TEXT NOT NULL,
    risk_level TEXT NOT NULL,
    risk_signals_json TEXT NOT NULL,
    category TEXT NOT NULL,
    previous_hash TEXT NOT NULL,
    integrity_hash TEXT NOT NULL,
    signature TEXT NOT NULL,
    latency_ms REAL,
    reviewer TEXT,
    parent_trace_id TEXT
);
CREATE INDEX IF NOT EXISTS idx_traces_timestamp ON traces (timestamp);
CREATE TABLE IF NOT EXISTS agent_keys (
    agent_id TEXT PRIMARY KEY,
    public_key TEXT NOT NULL,
    private_key TEXT NOT NULL,
    created_at INTEGER NOT NULL
);
"""


class AuditStore:
    """Single-writer audit chain backed by one SQLite file.

    Appends are serialized through a lock, so concurrent callers observe
    a total order with no forks; reads run on the same connection under
    the same lock (SQLite-level concurrency is not the bottleneck at
    gateway request rates).
    """

    def __init__(self, path: str | Path = ":memory:") -> None:
        self.path = str(path)
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._conn:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=NORMAL")
            self._conn.executescript(_SCHEMA)
        self._private_keys: dict[str, Ed25519PrivateKey] = {}
        row = self._conn.execute(
            "SELECT integrity_hash FROM traces ORDER BY id DESC LIMIT 1"
        ).fetchone()
        self._tail_hash = row["integrity_hash"] if row else GENESIS_HASH

    # -- keys ------------------------------------------------------------

    def register_agent_key(self, agent_id: str) -> str:
        """Create (or return) the agent's key pair; returns the public key b64.

        Idempotent: re-registering an agent returns the existing key.
        The private key never leaves this store.
        """
        if not agent_id:
            raise ValueError("agent_id must be non-empty")
        with self._lock:
            return self._register_locked(agent_id)

    def _register_locked(self, agent_id: str) -> str:
        row = self._conn.execute(
            "SELECT public_key, private_key FROM agent_keys WHERE agent_id = ?", (agent_id,)
        ).fetchone()
        if row is not None:
            if agent_id not in self._private_keys:
                self._private_keys[agent_id] = Ed25519PrivateKey.from_private_bytes(
                    base64.b64decode(row["private_key"])
                )
            return row["public_key"]
        private = Ed25519PrivateKey.generate()
        private_b64 = base64.b64encode(
            private.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption())
        ).decode("ascii")
        public_b64 = base64.b64encode(
            private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
        ).decode("ascii")
        with self._conn:
            self._conn.execute(
                "INSERT INTO agent_keys (agent_id, public_key, private_key, created_at)"
                " VALUES (?, ?, ?, ?)",
                (agent_id, public_b64, private_b64, int(time.time() * 1000)),
            )
        self._private_keys[agent_id] = private
        return public_b64

    def has_agent_key(self, agent_id: str) -> bool:
        if agent_id in self._private_keys:
            return True
        row = self._conn.execute(
            "SELECT 1 FROM agent_keys WHERE agent_id = ?", (agent_id,)
        ).fetchone()
        return row is not None

    def public_keys(self) -> dict[str, str]:
        """agent_id -> base64 raw public key, for offline verification."""
        rows = self._conn.execute("SELECT agent_id, public_key FROM agent_keys").fetchall()
        return {row["agent_id"]: row["public_key"] for row in rows}

    # -- append ----------------------------------------------------------

    def append(
        self,
        *,
        agent_id: str,
        tool_name: str,
        arguments: Any,
        session_id: str | None,
        decision: Decision,
        risk_level: RiskLevel,
        risk_signals: Iterable[RiskSignal] = (),
        category: Category = Category.GENERIC,
        trace_id: str | None = None,
        timestamp: int | None = None,
        latency_ms: float | None = None,
        reviewer: str | None = None,
        parent_trace_id: str | None = None,
        auto_register: bool = True,
    ) -> TraceRecord:
        """Hash, sign, and persist one record at the chain tail.

        Raises :class:`AuditUnavailable` when the agent has no signing
        key (and auto-registration is off) or the store cannot accept
        the write; the triggering check must then fail closed.
        """
        trace_id = trace_id or new_trace_id()
        timestamp = timestamp if timestamp is not None else int(time.time() * 1000)
        signals = tuple(risk_signals)
        with self._lock:
            try:
                if not self.has_agent_key(agent_id):
                    if not auto_register:
                        raise AuditUnavailable(f"no signing key registered for agent {agent_id!r}")
                    self._register_locked(agent_id)
                elif agent_id not in self._private_keys:
                    self._register_locked(agent_id)

                previous_hash = self._tail_hash
                payload = canonical_payload(
                    trace_id, agent_id, tool_name, arguments, session_id, timestamp, previous_hash
                )
                integrity_hash = compute_integrity_hash(payload)
                signature = base64.b64encode(
                    self._private_keys[agent_id].sign(integrity_hash.encode("ascii"))
                ).decode("ascii")

                with self._conn:
                    cursor = self._conn.execute(
                        "INSERT INTO traces (trace_id, agent_id, tool_name, arguments_json,"
                        " session_id, timestamp, decision, risk_level, risk_signals_json,"
                        " category, previous_hash, integrity_hash, signature, latency_ms,"
                        " reviewer, parent_trace_id)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (
                            trace_id,
                            agent_id,
                            tool_name,
                            json.dumps(arguments, ensure_ascii=False),
                            session_id,
                            timestamp,
                            decision.value,
                            risk_level.value,
                            json.dumps([s.to_wire() for s in signals], ensure_ascii=False),
                            category.value,
                            previous_hash,
                            integrity_hash,
                            signature,
                            latency_ms,
                            reviewer,
                            parent_trace_id,
                        ),
                    )
                self._tail_hash = integrity_hash
                chain_index = int(cursor.lastrowid)
            except AuditUnavailable:
                raise
            except (sqlite3.Error, ValueError, OSError) as exc:
                raise AuditUnavailable(f"audit append failed: {exc}") from exc

        return TraceRecord(
            trace_id=trace_id,
            agent_id=agent_id,
            tool_name=tool_name,
            arguments=arguments,
            session_id=session_id,
            timestamp=timestamp,
            decision=decision,
            risk_level=risk_level,
            risk_signals=signals,
            category=category,
            previous_hash=previous_hash,
            integrity_hash=integrity_hash,
            signature=signature,
            chain_index=chain_index,
            latency_ms=latency_ms,
            reviewer=reviewer,
            parent_trace_id=parent_trace_id,
        )

    # -- reads -----------------------------------------------------------

    def _row_to_record(self, row: sqlite3.Row) -> TraceRecord:
        signals = tuple(
            RiskSignal(
                pattern=s["pattern"],
                detail=s["detail"],
                severity=RiskLevel(s["severity"]),
            )
            for s in json.loads(row["risk_signals_json"])
        )
        return TraceRecord(
            trace_id=row["trace_id"],
            agent_id=row["agent_id"],
            tool_name=row["tool_name"],
            arguments=json.loads(row["arguments_json"]),
            session_id=row["session_id"],
            timestamp=row["timestamp"],
            decision=Decision(row["decision"]),
            risk_level=RiskLevel(row["risk_level"]),
            risk_signals=signals,
            category=Category(row["category"]),
            previous_hash=row["previous_hash"],
            integrity_hash=row["integrity_hash"],
            signature=row["signature"],
            chain_index=row["id"],
            latency_ms=row["latency_ms"],
            reviewer=row["reviewer"],
            parent_trace_id=row["parent_trace_id"],
        )

    def get(self, trace_id: str) -> TraceRecord | None:
        row = self._conn.execute("SELECT * FROM traces WHERE trace_id = ?", (trace_id,)).fetchone()
        return self._row_to_record(row) if row else None

    def records(self, *, since: int | None = None, until: int | None = None) -> list[TraceRecord]:
        """All records in chain order, optionally bounded by timestamp."""
        query = "SELECT * FROM traces"
        clauses, params = [], []
        if since is not None:
            clauses.append("timestamp > ?")
            params.append(since)
        if until is not None:
            clauses.append("timestamp <= ?")
            params.append(until)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY id ASC"
        return [self._row_to_record(r) for r in self._conn.execute(query, params).fetchall()]

    def feed(self, *, since: int | None = None, limit: int = 100) -> list[TraceRecord]:
        """Newest-first slice for the live activity view."""
        if since is not None:
            rows = self._conn.execute(
                "SELECT * FROM traces WHERE timestamp > ? ORDER BY id DESC LIMIT ?",
                (since, limit),
            ).fetchall()
        else:
            rows = self._conn.execute(
                "SELECT * FROM traces ORDER BY id DESC LIMIT ?", (limit,)
            ).fetchall()
        return [self._row_to_record(r) for r in rows]

    def count(self) -> int:
        return self._conn.execute("SELECT count(*) AS n FROM traces").fetchone()["n"]

    def verify(self) -> VerificationReport:
        """Verify the full stored chain against the registered keys."""
        wires = [r.to_wire() for r in self.records()]
        return verify_chain(wires, self.public_keys())

    # -- export ----------------------------------------------------------

    def export_report(self, *, since: int | None = None, until: int | None = None) -> dict:
        """Machine-readable export: records, verification, and summary."""
        selected = self.records(since=since, until=until)
        full_chain = self.verify()
        per_agent: dict[str, int] = {}
        per_decision: dict[str, int] = {}
        for record in selected:
            per_agent[record.agent_id] = per_agent.get(record.agent_id, 0) + 1
            per_decision[record.decision.value] = per_decision.get(record.decision.value, 0) + 1
        anomalies = per_decision.get("block", 0) + per_decision.get("resolved_block", 0)
        return {
            "records": [r.to_wire() for r in selected],
            "verification": full_chain.to_wire(),
            "summary": {
                "total_traces": len(selected),
                "agents": len(per_agent),
                "per_agent": per_agent,
                "per_decision": per_decision,
                "anomaly_count": anomalies,
            },
        }

    def write_export(self, records_path: str | Path, keys_path: str | Path | None = None) -> dict:
        """Write JSON-lines records (plus a trailing summary line) and a key bundle."""
        report = self.export_report()
        with open(records_path, "w", encoding="utf-8") as fh:
            for wire in report["records"]:
                fh.write(json.dumps(wire, ensure_ascii=False) + "\n")
        if keys_path is not None:
            Path(keys_path).write_text(json.dumps(self.public_keys(), indent=2) + "\n")
        return report

    def close(self) -> None:
        self._conn.close()


def summarize_report(report: dict) -> str:
    """Human-readable companion to :meth:`AuditStore.export_report`."""
    summary = report["summary"]
    verification = report["verification"]
    lines = [
        "audit export summary",
        f"  total traces : {summary['total_traces']}",
        f"  agents       : {summary['agents']}",
        f"  chain        : {'valid' if verification['valid'] else 'INVALID'}",
        f"  anomalies    : {summary['anomaly_count']}",
        "  decisions    :",
    ]
    for decision, count in sorted(summary["per_decision"].items()):
        lines.append(f"    {decision:<15} {count}")
    for agent, count in sorted(summary["per_agent"].items()):
        lines.append(f"    agent {agent:<20} {count}")
    return "\n".join(lines)


def load_exported_records(path: str | Path) -> list[dict]:
    records = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            records.append(json.loads(line))
    return records


def load_key_bundle(path: str | Path) -> dict[str, str]:
    return json.loads(Path(path).read_text())
