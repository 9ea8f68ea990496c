"""Extraction limits, ordering and the independent traversal oracle."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from toolgate.extraction import (
    MAX_DEPTH,
    MAX_STRINGS,
    ExtractionResult,
    TruncationReason,
    extract_strings,
)


def oracle_collect(value, depth=0):
    """Naive recursive traversal used as the independent oracle."""
    if isinstance(value, str):
        return [(value, depth)]
    if isinstance(value, dict):
        out = []
        for key in sorted(value.keys()):
            out.extend(oracle_collect(value[key], depth + 1))
        return out
    if isinstance(value, list):
        out = []
        for item in value:
            out.extend(oracle_collect(item, depth + 1))
        return out
    return []


def nest(value, depth, key="k"):
    """Wrap a value in `depth` single-key maps; the value ends at that depth."""
    for _ in range(depth):
        value = {key: value}
    return value


def test_flat_query_string():
    result = extract_strings({"query": "SELECT * FROM users; DROP TABLE audit_log; --"})
    assert result.strings == ["SELECT * FROM users; DROP TABLE audit_log; --"]
    assert not result.truncated
    assert result.truncation_reason is TruncationReason.NONE


def test_empty_tree():
    assert extract_strings({}) == ExtractionResult([], False, TruncationReason.NONE)


def test_scalars_are_not_stringified():
    result = extract_strings({"a": 1, "b": True, "c": None, "d": 2.5})
    assert result.strings == []


def test_map_keys_not_extracted():
    result = extract_strings({"DROP TABLE": 1})
    assert result.strings == []


def test_depth_50_truncates():
    result = extract_strings(nest("payload", 50))
    assert result.strings == []
    assert result.truncated
    assert result.truncation_reason is TruncationReason.DEPTH_EXCEEDED


def test_depth_20_is_surfaced():
    result = extract_strings(nest("payload", 20))
    assert result.strings == ["payload"]
    assert not result.truncated


def test_depth_boundary_exact():
    # Root is depth 0; a string behind 32 map steps sits exactly at the limit.
    assert extract_strings(nest("edge", MAX_DEPTH)).strings == ["edge"]
    deep = extract_strings(nest("edge", MAX_DEPTH + 1))
    assert deep.strings == []
    assert deep.truncation_reason is TruncationReason.DEPTH_EXCEEDED


def test_count_cap():
    items = [f"s{i}" for i in range(MAX_STRINGS + 1)]
    result = extract_strings(items)
    assert len(result.strings) == MAX_STRINGS
    assert result.strings == items[:MAX_STRINGS]
    assert result.truncation_reason is TruncationReason.COUNT_EXCEEDED
    # Oracle: the naive traversal sees one more string than the cap admits.
    assert len(oracle_collect(items)) == MAX_STRINGS + 1


def test_depth_wins_over_count():
    tree = {"a": [f"s{i}" for i in range(MAX_STRINGS + 1)], "b": nest("deep", 40)}
    result = extract_strings(tree)
    assert result.truncation_reason is TruncationReason.DEPTH_EXCEEDED


def test_deterministic_key_sorted_order():
    tree = {"b": "second", "a": "first", "c": ["third", {"z": "fifth", "y": "fourth"}]}
    result = extract_strings(tree)
    assert result.strings == ["first", "second", "third", "fourth", "fifth"]


def test_deeply_nested_does_not_recurse():
    # 5,000 levels would blow the interpreter stack under naive recursion.
    result = extract_strings(nest("x", 5000))
    assert result.truncation_reason is TruncationReason.DEPTH_EXCEEDED


json_values = st.recursive(
    st.none()
    | st.booleans()
    | st.integers(min_value=-(10**6), max_value=10**6)
    | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(max_size=8),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=4), children, max_size=4),
    max_leaves=40,
)


@given(json_values)
@settings(max_examples=200)
def test_matches_oracle_below_limits(tree):
    expected = oracle_collect(tree)
    result = extract_strings(tree)
    if all(depth <= MAX_DEPTH for _, depth in expected) and len(expected) <= MAX_STRINGS:
        assert result.strings == [s for s, _ in expected]
        assert not result.truncated


@given(json_values)
@settings(max_examples=100)
def test_determinism(tree):
    assert extract_strings(tree) == extract_strings(tree)


@given(json_values, st.integers(min_value=33, max_value=64))
@settings(max_examples=50)
def test_monotone_truncation(tree, extra_depth):
    """Wrapping a truncated tree deeper never clears the truncation flag."""
    before = extract_strings({"t": tree, "deep": nest("p", extra_depth)})
    assert before.truncated
    after = extract_strings({"t": {"w": tree}, "deep": nest("p", extra_depth + 1)})
    assert after.truncated
