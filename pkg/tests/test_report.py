import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osgoodlab.report import (CheckRow, VerificationReport, config_hash,
                              merge_reports)


def _rep(module, ids):
    return VerificationReport(module=module, rows=[
        CheckRow(i, "plumbing", 0.0, 1.0, True) for i in ids])


def test_merge_identity():
    r = _rep("m", ["a", "b"])
    merged = merge_reports([r])
    assert [row.check_id for row in merged.rows] == ["a", "b"]
    assert merged.summary() == {"total": 2, "passed": 2, "failed": 0}


def test_merge_disjoint_counts():
    merged = merge_reports([_rep("m1", ["a"]), _rep("m2", ["b", "c"])])
    assert merged.summary()["total"] == 3


def test_merge_duplicate_suffixing():
    merged = merge_reports([_rep("m", ["x"]), _rep("m", ["x"]), _rep("m", ["x"])])
    assert [row.check_id for row in merged.rows] == ["x", "x#2", "x#3"]


def test_merge_deterministic_order():
    a = merge_reports([_rep("b", ["z", "a"]), _rep("a", ["q"])])
    b = merge_reports([_rep("a", ["q"]), _rep("b", ["a", "z"])])
    assert a.to_json() == b.to_json()


def test_merge_rejects_empty():
    with pytest.raises(ValueError):
        merge_reports([])


def test_json_roundtrip_and_summary_consistency():
    rep = VerificationReport(module="m", rows=[
        CheckRow("ok", "(1)", 0.5, 1.0, True),
        CheckRow("bad", "(2)", 2.0, 1.0, False, detail="too big")])
    data = json.loads(rep.to_json())
    assert data["summary"] == {"total": 2, "passed": 1, "failed": 1}
    assert not rep.passed
    assert [r["check_id"] for r in data["rows"]] == ["ok", "bad"]


def test_config_hash_stable():
    h1 = config_hash({"b": 2, "a": 1})
    h2 = config_hash({"a": 1, "b": 2})
    assert h1 == h2
    assert h1 != config_hash({"a": 1, "b": 3})


@given(st.lists(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=5),
                min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_merge_preserves_row_count(groups):
    reports = [_rep(f"m{i}", ids) for i, ids in enumerate(groups)]
    merged = merge_reports(reports)
    assert len(merged.rows) == sum(len(ids) for ids in groups)
