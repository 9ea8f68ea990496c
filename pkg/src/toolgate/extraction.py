"""Deep string extraction from tool-call argument trees.

Argument trees are plain JSON values (the result of parsing a request
body), so they are finite and acyclic. Extraction walks the tree
depth-first and collects every string *value* -- map keys, numbers,
booleans and nulls are never extracted or stringified.

Two limits make the walk fail closed against adversarial inputs:

* strings nested deeper than ``MAX_DEPTH`` are not collected and flag
  the result as truncated (``depth_exceeded``);
* at most ``MAX_STRINGS`` strings are collected; further strings flag
  the result as truncated (``count_exceeded``).

Depth counting: the root value is depth 0 and every step into a map
value or list element adds 1. ``depth_exceeded`` wins over
``count_exceeded`` when both occur.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

MAX_DEPTH = 32
MAX_STRINGS = 10_000


class TruncationReason(str, enum.Enum):
    NONE = "none"
    DEPTH_EXCEEDED = "depth_exceeded"
    COUNT_EXCEEDED = "count_exceeded"


@dataclass(frozen=True)
class ExtractionResult:
    strings: list[str]
    truncated: bool
    truncation_reason: TruncationReason = TruncationReason.NONE

    def total_bytes(self) -> int:
        """UTF-8 size of the collected payload (used by the exfiltration check)."""
        return sum(len(s.encode("utf-8")) for s in self.strings)


def extract_strings(args: Any) -> ExtractionResult:
    """Collect all string values reachable at depth <= 32, capped at 10,000.

    Traversal is deterministic: depth-first, list elements in order, map
    keys visited in sorted order. The walk is iterative so that deeply
    nested inputs cannot exhaust the interpreter stack, and it always
    completes (collection stops at the cap but the scan for deep strings
    does not), so the truncation reason is stable for a given tree.
    """
    strings: list[str] = []
    deep_string_seen = False
    cap_hit = False

    # Stack of (value, depth); children are pushed in reverse so they pop
    # in deterministic forward order.
    stack: list[tuple[Any, int]] = [(args, 0)]
    while stack:
        value, depth = stack.pop()
        if isinstance(value, str):
            if depth > MAX_DEPTH:
                deep_string_seen = True
            elif len(strings) >= MAX_STRINGS:
                cap_hit = True
            else:
                strings.append(value)
        elif isinstance(value, dict):
            for key in sorted(value.keys(), reverse=True):
                stack.append((value[key], depth + 1))
        elif isinstance(value, (list, tuple)):
            for item in reversed(value):
                stack.append((item, depth + 1))
        # numbers / booleans / None carry no extractable text

    if deep_string_seen:
        reason = TruncationReason.DEPTH_EXCEEDED
    elif cap_hit:
        reason = TruncationReason.COUNT_EXCEEDED
    else:
        reason = TruncationReason.NONE
    return ExtractionResult(
        strings=strings,
        truncated=reason is not TruncationReason.NONE,
        truncation_reason=reason,
    )
