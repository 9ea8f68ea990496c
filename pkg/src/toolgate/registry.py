"""Versioned detection-pattern registry.

Patterns are data, not code: the registry ships as a JSON document so the
rule corpus can be audited and swapped without touching the scanner. The
loader compiles every expression once, verifies structural invariants
(the core table must hold exactly 22 patterns across the 7 categories
with the published per-category counts) and records the file checksum so
deployments can prove which corpus was active.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Pattern

from .model import Category, RiskLevel

# Core-table shape: category -> number of patterns.
EXPECTED_CATEGORY_COUNTS = {
    "sql_injection": 7,
    "path_traversal": 4,
    "shell_injection": 4,
    "prompt_injection": 3,
    "sensitive_file": 2,
    "data_exfiltration": 1,
    "pii_in_args": 1,
}
EXPECTED_PROMPT_SUB_PATTERNS = 17
EXPECTED_SENSITIVE_PATHS = 14


class RegistryError(ValueError):
    """Raised when the registry document is malformed or fails its audit."""


@dataclass(frozen=True)
class SubPattern:
    label: str
    regex: Pattern[str]


@dataclass(frozen=True)
class PatternEntry:
    id: str
    category: str
    severity: RiskLevel
    kind: str  # "regex" | "exfiltration" | "pii"
    label: str
    description: str
    tool_category: Category | None
    sub_patterns: tuple[SubPattern, ...] = ()
    min_payload_bytes: int = 0


@dataclass(frozen=True)
class PiiPattern:
    type: str
    regex: Pattern[str]


@dataclass(frozen=True)
class PatternRegistry:
    patterns: tuple[PatternEntry, ...]
    extras: tuple[PatternEntry, ...]
    pii_patterns: tuple[PiiPattern, ...]
    internal_hosts: tuple[str, ...]
    version: int
    checksum: str
    source: str

    @property
    def all_entries(self) -> tuple[PatternEntry, ...]:
        return self.patterns + self.extras

    def category_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.patterns:
            counts[entry.category] = counts.get(entry.category, 0) + 1
        return counts


def builtin_registry_path() -> Path:
    return Path(str(resources.files("toolgate").joinpath("data/pattern_registry.json")))


def _compile(expr: str, entry_id: str) -> Pattern[str]:
    try:
        return re.compile(expr)
    except re.error as exc:
        raise RegistryError(f"pattern {entry_id!r}: bad regex: {exc}") from None


def _parse_entry(raw: dict, *, where: str) -> PatternEntry:
    for key in ("id", "category", "severity", "label", "description"):
        if key not in raw:
            raise RegistryError(f"{where}: entry missing {key!r}: {raw.get('id', raw)}")
    entry_id = raw["id"]
    try:
        severity = RiskLevel(raw["severity"])
    except ValueError:
        raise RegistryError(f"pattern {entry_id!r}: unknown severity {raw['severity']!r}") from None
    tool_category = None
    if raw.get("tool_category"):
        try:
            tool_category = Category(raw["tool_category"])
        except ValueError:
            raise RegistryError(
                f"pattern {entry_id!r}: unknown tool_category {raw['tool_category']!r}"
            ) from None

    kind = raw.get("kind", "regex")
    subs: list[SubPattern] = []
    if kind == "regex":
        if "regex" in raw:
            subs.append(SubPattern(raw["label"], _compile(raw["regex"], entry_id)))
        elif "sub_patterns" in raw:
            for sub in raw["sub_patterns"]:
                subs.append(SubPattern(sub["label"], _compile(sub["regex"], entry_id)))
        elif "paths" in raw:
            # Fragment list compiled to one alternation; a trailing
            # word-boundary stops ".env" from matching ".environment".
            alts = [re.escape(p) + r"(?![A-Za-z0-9])" for p in raw["paths"]]
            subs.append(SubPattern(raw["label"], _compile("(?i)(?:%s)" % "|".join(alts), entry_id)))
        else:
            raise RegistryError(f"pattern {entry_id!r}: no regex, sub_patterns or paths")
    elif kind not in ("exfiltration", "pii"):
        raise RegistryError(f"pattern {entry_id!r}: unknown kind {kind!r}")

    return PatternEntry(
        id=entry_id,
        category=raw["category"],
        severity=severity,
        kind=kind,
        label=raw["label"],
        description=raw["description"],
        tool_category=tool_category,
        sub_patterns=tuple(subs),
        min_payload_bytes=int(raw.get("min_payload_bytes", 0)),
    )


def _audit(registry: PatternRegistry) -> None:
    counts = registry.category_counts()
    if counts != EXPECTED_CATEGORY_COUNTS:
        raise RegistryError(
            f"core pattern table mismatch: expected {EXPECTED_CATEGORY_COUNTS}, got {counts}"
        )
    total = sum(counts.values())
    if total != 22:
        raise RegistryError(f"core pattern table must hold 22 entries, got {total}")

    seen: set[str] = set()
    for entry in registry.all_entries:
        if entry.id in seen:
            raise RegistryError(f"duplicate pattern id {entry.id!r}")
        seen.add(entry.id)

    prompt_subs = sum(
        len(e.sub_patterns) for e in registry.patterns if e.category == "prompt_injection"
    )
    if prompt_subs != EXPECTED_PROMPT_SUB_PATTERNS:
        raise RegistryError(
            f"prompt-injection sub-pattern count must be "
            f"{EXPECTED_PROMPT_SUB_PATTERNS}, got {prompt_subs}"
        )


def load_registry(path: str | Path | None = None) -> PatternRegistry:
    """Load, compile and audit a registry document.

    Any structural problem (bad regex, wrong counts, duplicate ids)
    raises :class:`RegistryError`; a service must refuse to start on it.
    """
    source = Path(path) if path is not None else builtin_registry_path()
    raw_bytes = source.read_bytes()
    checksum = hashlib.sha256(raw_bytes).hexdigest()
    try:
        doc = json.loads(raw_bytes)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"registry {source}: invalid JSON: {exc}") from None

    patterns = tuple(_parse_entry(e, where="patterns") for e in doc.get("patterns", []))
    extras = tuple(_parse_entry(e, where="extras") for e in doc.get("extras", []))
    pii = tuple(
        PiiPattern(p["type"], _compile(p["regex"], f"pii:{p['type']}"))
        for p in doc.get("pii_patterns", [])
    )
    registry = PatternRegistry(
        patterns=patterns,
        extras=extras,
        pii_patterns=pii,
        internal_hosts=tuple(doc.get("internal_hosts", [])),
        version=int(doc.get("version", 0)),
        checksum=checksum,
        source=str(source),
    )
    _audit(registry)

    sensitive_paths = 0
    for entry in patterns:
        if entry.category == "sensitive_file":
            for sub in entry.sub_patterns:
                sensitive_paths += sub.regex.pattern.count("|") + 1
    if sensitive_paths != EXPECTED_SENSITIVE_PATHS:
        raise RegistryError(
            f"sensitive-path fragment count must be {EXPECTED_SENSITIVE_PATHS},"
            f" got {sensitive_paths}"
        )
    return registry
