import numpy as np
import pytest

from relcomm.brackets import parse_bracketing
from relcomm.elementary import elementary_alphabet
from relcomm.matrices import MatSpace, congruence_generators
from relcomm.rings import parse_ideal, parse_ring
from relcomm.verify import (
    DEGENERATE_NOTE,
    INSTANCE_NOTE,
    HypothesisError,
    LinearInstance,
    RunConfig,
    commutator_containment,
    commutator_witnesses,
    search_nonassociativity,
    verify_cut_point_invariance,
    verify_double_formulas,
    verify_double_reduction,
    verify_generator_theorems,
    verify_k1_stability,
    verify_multiple_formula,
    verify_oracle,
    verify_relations,
    verify_unitary,
)

OK = ("pass", "randomized-pass")


def statuses(records):
    return {r.check_id: r.status for r in records}


def test_run_config_mode_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="sometimes")


def test_describe_notes():
    inst = LinearInstance("zmod:6", 3, ["(2)", "(3)"])
    d = inst.describe(level=parse_ideal(inst.R, "(0)"))
    assert d["notes"] == [INSTANCE_NOTE, DEGENERATE_NOTE]
    assert d["ideals"] == ["(2)", "(3)"]


@pytest.mark.parametrize("desc,ideals", [("zmod:8", ["(2)", "(2)"]), ("zmod:8", ["(2)", "(4)"]),
                                         ("zmod:6", ["(2)", "(3)"])])
def test_double_formulas_pass(desc, ideals):
    recs = verify_double_formulas(LinearInstance(desc, 3, ideals))
    assert recs and all(r.status in ("pass", "skipped") for r in recs)
    # every equality appears as two separately evidenced containments
    ids = [r.check_id for r in recs]
    assert "generalized.[E(A,I),GL(A,J)]<=[E,E]" in ids and "generalized.[E,E]<=[E(A,I),GL(A,J)]" in ids


def test_comaximal_z6_is_degenerate_and_trivial():
    recs = verify_double_formulas(LinearInstance("zmod:6", 3, ["(2)", "(3)"]), checks=["comaximal"])
    (r,) = recs
    assert r.status == "pass" and DEGENERATE_NOTE in r.instance["notes"]


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        verify_double_formulas(LinearInstance("zmod:4", 3, ["(2)", "(2)"]), checks=["bogus"])


def test_n2_refused_then_explored():
    inst = LinearInstance("zmod:4", 2, ["(2)", "(2)"])
    with pytest.raises(HypothesisError):
        verify_double_formulas(inst)
    recs = verify_double_formulas(inst, cfg=RunConfig(unsafe_n2=True))
    assert {r.status for r in recs} <= {"skipped-hypotheses", "skipped"}


def test_containment_lemma_negative_control():
    # [GL(A), GL(A, J)] is not inside [E(I), E(J)] for A = Z/4, I = J = (2)
    inst = LinearInstance("zmod:4", 3, ["(2)", "(2)"])
    S = inst.space
    J = inst.ideals[1]
    T = inst.level_comm(J, J)
    X = np.concatenate([elementary_alphabet(S), congruence_generators(S, parse_ideal(S.R, "(1)"))])
    ev = commutator_containment(S, X, inst.gl_gens(J), T.generators(), T.contains_batch)
    assert not ev.ok and ev.witness is not None
    assert not T.contains_batch(ev.witness[None])[0]


def test_containment_lemma_positive():
    inst = LinearInstance("zmod:8", 3, ["(2)", "(4)"])
    I, J = inst.ideals
    T = inst.ee(I, J)
    ev = commutator_containment(inst.space, inst.z(I), inst.z(J), T.generators(), T.contains_batch)
    assert ev.ok


@pytest.mark.parametrize("level_first", [True, False])
def test_commutator_witnesses(level_first):
    S = MatSpace(parse_ring("zmod:8"), 3)
    assert commutator_witnesses(S, parse_ideal(S.R, "(2)"), level_first).ok


def test_generator_theorems():
    recs = verify_generator_theorems(LinearInstance("zmod:8", 3, ["(2)", "(2)"]))
    assert len(recs) == 4 and all(r.status == "pass" for r in recs)


def test_generator_theorems_zero_ideal():
    recs = verify_generator_theorems(LinearInstance("zmod:4", 3, ["(0)", "(2)"]))
    assert all(r.status == "pass" for r in recs)
    assert all(DEGENERATE_NOTE in r.instance["notes"] for r in recs)


def test_multiple_formula_m1_matches_double():
    inst = LinearInstance("zmod:8", 3, ["(2)", "(2)"])
    recs = verify_multiple_formula(inst)
    assert all(r.status == "pass" for r in recs) and len(recs) == 2


def test_multiple_formula_randomized_records_seed():
    cfg = RunConfig(mode="randomized", seed=5, samples=500)
    inst = LinearInstance("zmod:8", 3, ["(2)", "(2)", "(2)"], cfg)
    recs = verify_multiple_formula(inst, "left", cfg)
    lhs = [r for r in recs if r.check_id.endswith("lhs<=rhs")]
    assert lhs and lhs[0].status == "randomized-pass"
    assert lhs[0].seed == 5 and lhs[0].cardinalities["samples"] == 500


def test_double_reduction_and_cut_points():
    inst = LinearInstance("zmod:4", 3, ["(2)", "(1)", "(1)", "(1)"])
    recs = verify_cut_point_invariance(inst)
    assert recs and all(r.status == "pass" for r in recs)
    inst2 = LinearInstance("zmod:8", 3, ["(2)", "(2)", "(2)"])
    for tree in ("[[0,1],2]", "[0,[1,2]]"):
        (r,) = verify_double_reduction(inst2, parse_bracketing(tree))
        assert r.status == "pass"


def test_nonassociativity_commutative_has_no_witness():
    recs = search_nonassociativity(["zmod:4", "zmod:6"])
    r = statuses(recs)
    assert r["nonassoc.ideals"] == "pass"
    ideal_rec = next(x for x in recs if x.check_id == "nonassoc.ideals")
    assert ideal_rec.cardinalities.get("witnesses", 0) == 0


@pytest.mark.parametrize("ring,ideal", [("zmod:4", "(2)"), ("zmod:2", "(1)"), ("zmod:4", "(0)"), ("zmod:6", "(2)")])
def test_k1_stability(ring, ideal):
    recs = verify_k1_stability(ring, ideal)
    assert statuses(recs) == {"k1.surjective": "pass", "k1.injective": "pass"}


def test_k1_reports_congruence_order():
    recs = verify_k1_stability("zmod:4", "(2)")
    assert any(16 in r.cardinalities.values() for r in recs)


def test_relations_suite():
    recs = verify_relations(LinearInstance("zmod:4", 3, ["(2)", "(2)"]))
    ids = [r.check_id for r in recs]
    assert ids.count("relations.conjugation-identity.(2)") == 1
    assert all(r.status == "pass" for r in recs)


def test_oracle_suite_limits():
    recs = verify_oracle(LinearInstance("zmod:4", 3, ["(2)", "(1)"]))
    st = statuses(recs)
    assert st["oracle.(2),(2)"] == "pass" and st["oracle.(1),(1)"] == "skipped"


def test_unitary_suite_axioms_and_relations():
    recs = verify_unitary("form:zmod:3;lambda=2;Lambda=max", 3)
    st = statuses(recs)
    assert st["unitary.form-axioms"] == "pass"
    assert all(st[f"unitary.steinberg.R{k}"] == "pass" for k in range(1, 7))
