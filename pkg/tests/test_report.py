import io
import json

import numpy as np
import pytest

from relcomm.matrices import MatSpace
from relcomm.report import (
    VerificationRecord,
    any_failed,
    emit_report,
    load_report,
    matrix_witness,
    parse_matrix_witness,
    summary_table,
)
from relcomm.rings import parse_ring

INST = {"ring": "zmod:8", "n": 3, "ideals": ["(2)"], "mode": "exhaustive", "notes": []}


def test_empty_report(tmp_path):
    out = io.StringIO()
    path = tmp_path / "r.jsonl"
    emit_report([], path, out)
    assert path.read_text() == ""
    assert out.getvalue().strip() == "0 checks"


def test_single_pass_line(tmp_path):
    path = tmp_path / "r.jsonl"
    emit_report([VerificationRecord("x", INST, "pass", {"|G|": 8})], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 and '"status":"pass"' in lines[0]
    assert list(json.loads(lines[0])) == ["check_id", "instance", "status", "cardinalities", "witness",
                                          "elapsed", "seed"]


@pytest.mark.parametrize("desc", ["zmod:8", "zi:0,2", "tri:zmod:2,2"])
def test_failure_witness_roundtrip(tmp_path, desc):
    S = MatSpace(parse_ring(desc), 2)
    g = S.elementary(0, 1, S.R.size - 1)
    rec = VerificationRecord("bad", INST, "fail", {}, matrix_witness(S, g, note="outside"))
    path = tmp_path / "r.jsonl"
    emit_report([rec], path)
    back = load_report(path)[0]
    assert back.status == "fail" and back.witness["note"] == "outside"
    assert np.array_equal(parse_matrix_witness(S, back.witness), g)
    assert any_failed([back])


def test_status_validation():
    with pytest.raises(ValueError):
        VerificationRecord("x", INST, "maybe")
    with pytest.raises(ValueError):
        VerificationRecord("x", INST, "fail")
    with pytest.raises(ValueError):
        VerificationRecord("x", INST, "randomized-pass", {})
    VerificationRecord("x", INST, "randomized-pass", {"samples": 10}, seed=1)


def test_emission_is_sorted_and_timing_free():
    recs = [VerificationRecord("b", INST, "pass", elapsed=1.5), VerificationRecord("a", INST, "skipped")]
    text = emit_report(recs)
    ids = [json.loads(line)["check_id"] for line in text.splitlines()]
    assert ids == ["a", "b"]
    assert all(json.loads(line)["elapsed"] is None for line in text.splitlines())


def test_numpy_scalars_serialise():
    rec = VerificationRecord("x", INST, "pass", {"|G|": np.int64(5), "ok": np.bool_(True)})
    assert '"|G|":5' in rec.to_json()


def test_summary_counts():
    recs = [VerificationRecord("a", INST, "pass"), VerificationRecord("b", INST, "skipped")]
    table = summary_table(recs)
    assert table.splitlines()[-1] == "2 checks: 1 pass, 1 skipped"
    assert "zmod:8 n=3 (2)" in table
