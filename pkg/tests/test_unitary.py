import numpy as np
import pytest

from relcomm.rings import parse_ideal
from relcomm.unitary import (
    FormError,
    UnitarySpace,
    check_steinberg_relations,
    eu_alphabet,
    eu_z_generators,
    form_ideal_sym_product,
    make_form_ideal,
    parse_form_ideal,
    parse_form_ring,
    unitary_subgroup,
    validate_form_ring,
    verify_unitary_chain,
    whole_form_ideal,
    zero_form_ideal,
)

SYMPLECTIC3 = "form:zmod:3;lambda=2;Lambda=max"
ORTHOGONAL8 = "form:zmod:8;lambda=1;Lambda=min"
SPECIAL_CASES = [
    SYMPLECTIC3,
    "form:zi:3,0;inv=conj;lambda=2;Lambda=min",
    "form:prod:zmod:2;zmod:2;inv=swap;lambda=(1;1);Lambda=min",
    "form:zmod:2;Lambda=max",
]


def lam_sets(desc):
    FR = parse_form_ring(desc)
    return list(np.flatnonzero(FR.Lmin)), list(np.flatnonzero(FR.Lmax)), FR


@pytest.mark.parametrize("desc", SPECIAL_CASES)
def test_special_case_form_rings_validate(desc):
    assert validate_form_ring(parse_form_ring(desc)) == []


def test_form_parameter_bounds():
    lo, hi, _ = lam_sets("form:zmod:2;Lambda=min")
    assert (lo, hi) == ([0], [0, 1])
    lo, hi, _ = lam_sets(ORTHOGONAL8)
    assert (lo, hi) == ([0], [0, 4])
    lo, hi, FR = lam_sets(SYMPLECTIC3)
    assert lo == hi == [0, 1, 2]
    assert list(np.flatnonzero(FR.Lambda)) == [0, 1, 2]


def test_bad_form_rings():
    with pytest.raises(FormError):
        parse_form_ring("zmod:3")
    with pytest.raises(FormError):
        parse_form_ring("form:zmod:8;lambda=2")  # lambda * conj(lambda) != 1
    with pytest.raises(FormError):
        parse_form_ring("form:zmod:8;lambda=1;Lambda=2")  # escapes Lambda_max


def test_form_ideal_products():
    FR = parse_form_ring(ORTHOGONAL8)
    P = parse_form_ideal(FR, "fideal:2;Gamma=min")
    PQ = form_ideal_sym_product(P, P)
    assert PQ.I == parse_ideal(FR.ring, "(4)")
    assert list(PQ.gamma_elements()) == [0]
    W = whole_form_ideal(FR)
    assert form_ideal_sym_product(W, W).I.is_whole()
    S = parse_form_ring(SYMPLECTIC3)
    Z = zero_form_ideal(S)
    assert form_ideal_sym_product(Z, Z).I.is_zero()


def test_form_ideal_gamma_bounds():
    FR = parse_form_ring(ORTHOGONAL8)
    with pytest.raises(FormError):
        make_form_ideal(FR, parse_ideal(FR.ring, "(2)"), [2])


def test_membership_examples():
    US = UnitarySpace(parse_form_ring(SYMPLECTIC3), 3)
    S = US.space
    assert US.member(S.eye)
    for xi in range(3):
        assert US.member(US.transvection(1, 2, xi))
    assert not US.member(S.diag([2, 1, 1, 1, 1, 1]))


def test_transvection_shapes():
    US = UnitarySpace(parse_form_ring(SYMPLECTIC3), 3)
    T = US.transvection(1, 2, 1)
    # xi at (1,2) and the partner entry at (-2,-1)
    assert T[US.pos(1), US.pos(2)] == 1
    assert T[US.pos(-2), US.pos(-1)] == 2
    L = US.transvection(1, -1, 2)
    expect = US.space.eye.copy()
    expect[US.pos(1), US.pos(-1)] = 2
    assert np.array_equal(L, expect)


def test_long_root_parameter_validation():
    US = UnitarySpace(parse_form_ring(ORTHOGONAL8), 3)
    with pytest.raises(FormError):
        US.transvection(1, -1, 2)
    with pytest.raises(ValueError):
        US.transvection(1, 1, 1)


@pytest.mark.parametrize("desc", [SYMPLECTIC3, ORTHOGONAL8])
def test_steinberg_relations(desc):
    rep = check_steinberg_relations(UnitarySpace(parse_form_ring(desc), 3))
    assert sorted(rep) == ["R1", "R2", "R3", "R4", "R5", "R6"]
    for name, (checks, fails, wit) in rep.items():
        assert checks > 0 and fails == 0, (name, wit)


def test_sp4_f2_order():
    US = UnitarySpace(parse_form_ring("form:zmod:2;Lambda=max"), 2)
    G = unitary_subgroup(US, whole_form_ideal(US.FR), "GU")
    q = 2
    assert G.group.size == 720 == q**4 * (q**2 - 1) * (q**4 - 1)


def test_zero_level_subgroups_trivial():
    US = UnitarySpace(parse_form_ring(ORTHOGONAL8), 3)
    Z = zero_form_ideal(US.FR)
    assert unitary_subgroup(US, Z, "FU").group.size == 1


def test_eu_inside_gu_at_level_two():
    US = UnitarySpace(parse_form_ring(ORTHOGONAL8), 3)
    P = parse_form_ideal(US.FR, "fideal:2;Gamma=min")
    gu = unitary_subgroup(US, P, "GU")
    assert gu.group is None  # 2^36 candidates: predicate only
    assert gu.contains_batch(eu_z_generators(US, P)).all()
    assert US.member(eu_alphabet(US)).all()


def test_unknown_kind():
    US = UnitarySpace(parse_form_ring(SYMPLECTIC3), 3)
    with pytest.raises(ValueError):
        unitary_subgroup(US, whole_form_ideal(US.FR), "XU")


def test_chain_trivial_level():
    US = UnitarySpace(parse_form_ring(ORTHOGONAL8), 3)
    Z = zero_form_ideal(US.FR)
    rep = verify_unitary_chain(US, Z, Z)
    assert rep.ok
    assert rep.sizes["EU(PoQ)"] == rep.sizes["[FU,FU]"] == rep.sizes["[EU,EU]"] == 1


def test_chain_degenerate_z4():
    US = UnitarySpace(parse_form_ring("form:zmod:4;lambda=1;Lambda=min"), 3)
    P = parse_form_ideal(US.FR, "fideal:2;Gamma=min")
    rep = verify_unitary_chain(US, P, P, samples=500)
    assert rep.product.I.is_zero()
    assert rep.ok
    assert rep.sizes["[EU,EU]"] == 1


def test_chain_needs_n3():
    US = UnitarySpace(parse_form_ring(SYMPLECTIC3), 2)
    W = whole_form_ideal(US.FR)
    with pytest.raises(ValueError):
        verify_unitary_chain(US, W, W)
