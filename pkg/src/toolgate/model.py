"""Shared domain types: severity scale, tool categories, signals, decisions."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class RiskLevel(str, enum.Enum):
    """Four-level severity scale, totally ordered LOW < MEDIUM < HIGH < CRITICAL."""

    LOW = "LOW"
    MEDIUM = "MEDIUM"
    HIGH = "HIGH"
    CRITICAL = "CRITICAL"

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]

    def __lt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, RiskLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, RiskLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, RiskLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: object) -> bool:  # type: ignore[override]
        if not isinstance(other, RiskLevel):
            return NotImplemented
        return self.rank >= other.rank


_LEVEL_RANK = {
    RiskLevel.LOW: 0,
    RiskLevel.MEDIUM: 1,
    RiskLevel.HIGH: 2,
    RiskLevel.CRITICAL: 3,
}


class Category(str, enum.Enum):
    """Tool category a call is classified into; exactly one per call.

    ``file_read`` is accepted as a server-override value but no built-in
    rule emits it; the wire name for filesystem is canonical, with "file"
    tolerated as a legacy alias when comparing recorded responses.
    """

    DATABASE = "database"
    FILESYSTEM = "filesystem"
    SHELL = "shell"
    NETWORK = "network"
    COMMUNICATION = "communication"
    FILE_READ = "file_read"
    GENERIC = "generic"


# Tie-break order when several equally severe signals disagree on category.
CATEGORY_PRIORITY = (
    Category.DATABASE,
    Category.FILESYSTEM,
    Category.SHELL,
    Category.NETWORK,
    Category.COMMUNICATION,
)

CATEGORY_ALIASES = {"file": Category.FILESYSTEM}


class Decision(str, enum.Enum):
    ALLOW = "allow"
    BLOCK = "block"
    PENDING = "pending"
    RESOLVED_ALLOW = "resolved_allow"
    RESOLVED_BLOCK = "resolved_block"


class PiiType(str, enum.Enum):
    EMAIL = "EMAIL"
    SSN = "SSN"
    CREDIT_CARD = "CREDIT_CARD"
    API_KEY = "API_KEY"
    JWT = "JWT"
    DB_CONNECTION = "DB_CONNECTION"
    AWS_ARN = "AWS_ARN"
    PHONE = "PHONE"
    IP_ADDRESS = "IP_ADDRESS"
    IBAN = "IBAN"
    PASSPORT = "PASSPORT"


@dataclass(frozen=True)
class RiskSignal:
    """One detection hit: which pattern family fired, why, and how severe."""

    pattern: str
    detail: str
    severity: RiskLevel
    category: Category = Category.GENERIC

    def to_wire(self) -> dict:
        return {
            "pattern": self.pattern,
            "detail": self.detail,
            "severity": self.severity.value,
        }


@dataclass(frozen=True)
class PiiFinding:
    """One PII occurrence with its UTF-8 byte span in the scanned string."""

    pii_type: PiiType
    span: tuple[int, int]
    matched_text: str


def max_severity(signals: list[RiskSignal] | tuple[RiskSignal, ...]) -> RiskLevel:
    """Aggregate severity: maximum over the total order, LOW when empty."""
    level = RiskLevel.LOW
    for sig in signals:
        if sig.severity > level:
            level = sig.severity
    return level
