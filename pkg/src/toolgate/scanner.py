"""Content-first risk scanning over extracted argument strings.

The scanner matches NFC-normalized text against the pattern registry,
runs the PII table, evaluates the aggregate exfiltration check, and
folds the raw hits into one wire signal per pattern family. Path
patterns additionally get up to two URL-decode rounds as a fallback so
double-encoded traversal cannot slip past a single-decode matcher.

Classification is server-authoritative: the category and risk level are
derived only from argument content, the tool name, and the server-side
override table -- never from client-supplied metadata.
"""

from __future__ import annotations

import ipaddress
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Mapping
from urllib.parse import unquote, urlsplit

from .model import (
    CATEGORY_PRIORITY,
    Category,
    PiiFinding,
    PiiType,
    RiskLevel,
    RiskSignal,
    max_severity,
)
from .registry import PatternEntry, PatternRegistry, SubPattern, load_registry

_URL_RE = re.compile(r"\bhttps?://[^\s<>'\"]+", re.IGNORECASE)

# Keyword fallback for tools whose arguments carried no categorized
# signal; first match wins, so "execute_sql" lands on database.
_TOOL_KEYWORDS: tuple[tuple[str, Category], ...] = (
    ("sql", Category.DATABASE),
    ("file", Category.FILESYSTEM),
    ("read", Category.FILESYSTEM),
    ("write", Category.FILESYSTEM),
    ("shell", Category.SHELL),
    ("exec", Category.SHELL),
    ("command", Category.SHELL),
    ("http", Category.NETWORK),
    ("search", Category.NETWORK),
    ("url", Category.NETWORK),
    ("email", Category.COMMUNICATION),
    ("message", Category.COMMUNICATION),
)

_STACKED_FOLLOWER = re.compile(r"\s+([A-Za-z_]+)")
_PATH_TAIL = re.compile(r"[^\s'\"<>|]{0,48}")


@dataclass(frozen=True)
class ScanHit:
    """One registry sub-pattern firing on one string (pre-merge)."""

    entry_id: str
    family: str
    severity: RiskLevel
    tool_category: Category | None
    label: str
    detail: str


def _detail_for(entry: PatternEntry, sub: SubPattern, match: re.Match, text: str) -> tuple[str, str]:
    """Build (short label, standalone detail) for a hit.

    Most entries use their static label; a few derive detail from the
    match so operators see the offending fragment.
    """
    if entry.id == "sql_stacked_query":
        verb = match.group(0).lstrip("; \t").upper()
        follower = _STACKED_FOLLOWER.match(text, match.end())
        phrase = verb if follower is None else f"{verb} {follower.group(1).upper()}"
        return sub.label, f"Stacked query: {phrase}"
    if entry.category == "sensitive_file":
        tail = _PATH_TAIL.match(text, match.start())
        shown = tail.group(0) if tail else match.group(0)
        return sub.label, f"Sensitive path: {shown}"
    if entry.id == "path_urlencoded":
        return sub.label, f"URL-encoded traversal: {match.group(0)}"
    if entry.id == "shell_metachar":
        frag = match.group(0).strip()[:32]
        return sub.label, f"Shell metacharacters: {frag}"
    if entry.id == "shell_remote_fetch":
        cmd = match.group(0).split(None, 1)[0]
        return sub.label, f"Remote fetch: {cmd}"
    if entry.id == "shell_dangerous_cmd":
        return sub.label, f"Destructive command: {match.group(0).strip()}"
    return sub.label, sub.label


def _merge_families(hits: list[ScanHit]) -> list[RiskSignal]:
    """Fold per-pattern hits into one signal per family, registry order.

    The prompt-injection family composes its sub-pattern labels ("ignore
    previous + DAN mode + ..."); other families join standalone details
    when more than one technique fired.
    """
    by_family: dict[str, list[ScanHit]] = {}
    order: list[str] = []
    for hit in hits:
        if hit.family not in by_family:
            by_family[hit.family] = []
            order.append(hit.family)
        by_family[hit.family].append(hit)

    signals: list[RiskSignal] = []
    for family in order:
        family_hits = by_family[family]
        severity = max(h.severity for h in family_hits)
        category = next(
            (h.tool_category for h in family_hits if h.tool_category is not None),
            Category.GENERIC,
        )
        if family == "prompt_injection":
            labels = _unique([h.label for h in family_hits])[:3]
            detail = "Jailbreak: " + " + ".join(labels)
        else:
            details = _unique([h.detail for h in family_hits])[:3]
            detail = " + ".join(details)
        signals.append(RiskSignal(pattern=family, detail=detail, severity=severity, category=category))
    return signals


def _unique(items: list[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


class Scanner:
    """Immutable scanning engine bound to one loaded registry."""

    def __init__(self, registry: PatternRegistry | None = None, *, internal_hosts: Iterable[str] = ()) -> None:
        self.registry = registry if registry is not None else load_registry()
        hosts = set(h.lower() for h in self.registry.internal_hosts)
        hosts.update(h.lower() for h in internal_hosts)
        self._internal_hosts = frozenset(hosts)

    # -- pattern scanning ------------------------------------------------

    def scan(
        self,
        strings: list[str],
        tool_name: str,
        *,
        pii_findings: list[PiiFinding] | None = None,
    ) -> list[RiskSignal]:
        """Match all registry patterns and return one signal per family.

        Regex patterns run over every extracted string and the tool name;
        the exfiltration entry aggregates over the whole payload; the PII
        entry summarizes ``detect_pii`` output (precomputed findings can
        be passed in to avoid a second pass).
        """
        return _merge_families(self.scan_hits(strings, tool_name, pii_findings=pii_findings))

    def scan_hits(
        self,
        strings: list[str],
        tool_name: str = "",
        *,
        pii_findings: list[PiiFinding] | None = None,
    ) -> list[ScanHit]:
        """Pre-merge hits, one per registry entry at most; used for audits."""
        texts = [_normalize(s) for s in strings]
        scannable = texts + [_normalize(tool_name)] if tool_name else texts

        path_entries = [
            e for e in self.registry.all_entries
            if e.kind == "regex" and e.category == "path_traversal"
        ]
        path_hits = self._path_hits(path_entries, scannable)

        hits: list[ScanHit] = []
        path_emitted = False
        for entry in self.registry.all_entries:
            if entry.kind == "regex" and entry.category == "path_traversal":
                if not path_emitted:
                    hits.extend(path_hits)
                    path_emitted = True
            elif entry.kind == "regex":
                hits.extend(self._regex_hits(entry, scannable))
            elif entry.kind == "exfiltration":
                hit = self._exfiltration_hit(entry, texts)
                if hit is not None:
                    hits.append(hit)
            elif entry.kind == "pii":
                findings = pii_findings if pii_findings is not None else self.detect_pii(strings)
                if findings:
                    types, count = summarize_pii(findings)
                    detail = f"PII detected: {', '.join(t.value for t in types)} ({count} items)"
                    hits.append(
                        ScanHit(entry.id, entry.category, entry.severity, entry.tool_category, entry.label, detail)
                    )
        return hits

    def _regex_hits(self, entry: PatternEntry, texts: list[str]) -> list[ScanHit]:
        hits: list[ScanHit] = []
        for sub in entry.sub_patterns:
            for text in texts:
                match = sub.regex.search(text)
                if match is not None:
                    label, detail = _detail_for(entry, sub, match, text)
                    hits.append(
                        ScanHit(entry.id, entry.category, entry.severity, entry.tool_category, label, detail)
                    )
                    break  # one hit per sub-pattern is enough
        return hits

    def _path_hits(self, entries: list[PatternEntry], texts: list[str]) -> list[ScanHit]:
        """Path patterns with decode fallback, one hit per entry.

        The fallback URL-decode rounds (at most two) run only for strings
        on which no path pattern matched raw text, so an encoded payload
        is attributed to its encoding technique rather than re-reported
        as a literal traversal of its decoded form.
        """
        matched: dict[str, tuple[re.Match, str]] = {}
        for text in texts:
            found_raw = False
            for entry in entries:
                sub = entry.sub_patterns[0]
                m = sub.regex.search(text)
                if m is not None:
                    found_raw = True
                    matched.setdefault(entry.id, (m, text))
            if found_raw:
                continue
            current = text
            for _ in range(2):
                decoded = unquote(current)
                if decoded == current:
                    break
                hit_any = False
                for entry in entries:
                    sub = entry.sub_patterns[0]
                    m = sub.regex.search(decoded)
                    if m is not None:
                        hit_any = True
                        matched.setdefault(entry.id, (m, decoded))
                if hit_any:
                    break
                current = decoded

        hits: list[ScanHit] = []
        for entry in entries:
            if entry.id in matched:
                m, source = matched[entry.id]
                label, detail = _detail_for(entry, entry.sub_patterns[0], m, source)
                hits.append(
                    ScanHit(entry.id, entry.category, entry.severity, entry.tool_category, label, detail)
                )
        return hits

    def _exfiltration_hit(self, entry: PatternEntry, texts: list[str]) -> ScanHit | None:
        payload = sum(len(t.encode("utf-8")) for t in texts)
        if payload <= entry.min_payload_bytes:
            return None
        for text in texts:
            for url in _URL_RE.findall(text):
                if self._is_external(url):
                    return ScanHit(
                        entry.id,
                        entry.category,
                        entry.severity,
                        entry.tool_category,
                        entry.label,
                        entry.label,
                    )
        return None

    def _is_external(self, url: str) -> bool:
        host = urlsplit(url).hostname
        if not host:
            return False
        host = host.strip("[]").lower()
        if host == "localhost" or host.endswith(".localhost"):
            return False
        for allowed in self._internal_hosts:
            if host == allowed or host.endswith("." + allowed):
                return False
        try:
            addr = ipaddress.ip_address(host)
        except ValueError:
            return True
        return not (
            addr.is_loopback or addr.is_private or addr.is_link_local or addr.is_unspecified
        )

    # -- PII -------------------------------------------------------------

    def detect_pii(self, strings: list[str]) -> list[PiiFinding]:
        """All PII matches with types and UTF-8 byte spans, in table order per string."""
        findings: list[PiiFinding] = []
        for raw in strings:
            text = _normalize(raw)
            for pattern in self.registry.pii_patterns:
                for match in pattern.regex.finditer(text):
                    start = len(text[: match.start()].encode("utf-8"))
                    end = start + len(match.group(0).encode("utf-8"))
                    findings.append(
                        PiiFinding(
                            pii_type=PiiType(pattern.type),
                            span=(start, end),
                            matched_text=match.group(0),
                        )
                    )
        return findings

    def redact_pii(self, text: str) -> str:
        """Replace every PII match with ``[REDACTED:<TYPE>]``; idempotent."""
        out = _normalize(text)
        for pattern in self.registry.pii_patterns:
            out = pattern.regex.sub(f"[REDACTED:{pattern.type}]", out)
        return out

    def redact_tree(self, args):
        """Apply :meth:`redact_pii` to every string value in an argument tree."""
        if isinstance(args, str):
            return self.redact_pii(args)
        if isinstance(args, dict):
            return {k: self.redact_tree(v) for k, v in args.items()}
        if isinstance(args, list):
            return [self.redact_tree(v) for v in args]
        return args

    # -- classification ---------------------------------------------------

    def classify(
        self,
        tool_name: str,
        signals: list[RiskSignal],
        server_overrides: Mapping[str, Category] | None = None,
    ) -> tuple[Category, RiskLevel]:
        """Derive (category, risk level) under the strict priority order.

        1. Highest-severity signal that carries an enforcing category,
           ties broken database > filesystem > shell > network >
           communication. Signals without an inherent tool category
           (prompt injection, PII) never drive classification.
        2. Tool-name keyword map.
        3. Server-side override table.
        4. generic.
        """
        level = max_severity(signals)

        driving = [s for s in signals if s.category in CATEGORY_PRIORITY]
        if driving:
            top = max(s.severity for s in driving)
            candidates = {s.category for s in driving if s.severity == top}
            for category in CATEGORY_PRIORITY:
                if category in candidates:
                    return category, level

        lowered = tool_name.lower()
        for keyword, category in _TOOL_KEYWORDS:
            if keyword in lowered:
                return category, level

        if server_overrides:
            override = server_overrides.get(tool_name)
            if override is not None:
                return Category(override), level

        return Category.GENERIC, level


def summarize_pii(findings: list[PiiFinding]) -> tuple[list[PiiType], int]:
    """Distinct types in table order plus the count of distinct (type, text) pairs."""
    type_order = [t for t in PiiType]
    present = {f.pii_type for f in findings}
    types = [t for t in type_order if t in present]
    count = len({(f.pii_type, f.matched_text) for f in findings})
    return types, count


def _normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text)
