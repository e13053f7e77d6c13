import itertools

import numpy as np
import pytest

from relcomm.elementary import (
    ConjBlock,
    Elem,
    ElemWord,
    ZLet,
    certify_relative_elementary,
    check_conjugation_identity,
    check_elem_relations,
    elementary_subgroup,
    factor_unitriangular,
    format_word,
    parse_word,
    random_elementary_word,
    rewrite_conjugated_generator,
    whitehead_factor,
    word_parameters_in,
)
from relcomm.matrices import MatSpace, congruence_member, random_congruence_batch, random_congruence_element
from relcomm.rings import parse_ideal, parse_ring


def space(desc, n=3):
    return MatSpace(parse_ring(desc), n)


def test_empty_word_is_identity():
    S = space("zmod:4")
    assert np.array_equal(ElemWord(S).eval(), S.eye)


def test_commutator_word_gives_e13():
    S = space("zmod:8")
    a, b = 3, 5
    R = S.R
    w = ElemWord(S, [Elem(1, 2, a), Elem(2, 3, b), Elem(1, 2, R.neg(a)), Elem(2, 3, R.neg(b))])
    assert np.array_equal(w.eval(), S.elementary(0, 2, R.mul(a, b)))


def test_z_letter_with_zero_conjugator():
    S = space("zmod:4")
    assert np.array_equal(ElemWord(S, [ZLet(1, 2, 0, 3)]).eval(), S.elementary(0, 1, 3))


def test_letter_index_validation():
    S = space("zmod:4")
    with pytest.raises(ValueError):
        ElemWord(S, [Elem(1, 4, 1)])
    with pytest.raises(ValueError):
        Elem(2, 2, 1)


def test_word_inverse():
    S = space("zmod:8")
    letters = [ZLet(1, 2, 3, 2), Elem(3, 1, 5), ZLet(2, 3, 1, 4, inv=True)]
    w = ElemWord(S, letters)
    assert np.array_equal(S.mul(w.eval(), w.inverse().eval()), S.eye)


def test_format_parse_roundtrip():
    S = space("zmod:8")
    w = ElemWord(S, [Elem(1, 2, 2), ZLet(2, 3, 7, 4)])
    back = parse_word(S, format_word(w))
    assert np.array_equal(back.eval(), w.eval())


@pytest.mark.parametrize("desc", ["zmod:4", "zmod:6", "tri:zmod:2,2"])
def test_elem_relations_exhaustive(desc):
    rep = check_elem_relations(space(desc))
    assert rep.ok
    assert all(rep.checks[k] > 0 for k in ("E1", "E2", "E3"))


def test_e1_additivity_sample():
    S = space("zmod:4")
    assert np.array_equal(S.mul(S.elementary(0, 1, 1), S.elementary(0, 1, 1)), S.elementary(0, 1, 2))


def test_e3_with_roles_swapped():
    # [e12(a), e31(b)] = e32(-ba) over Z/4
    S = space("zmod:4")
    R = S.R
    for a, b in itertools.product(range(4), repeat=2):
        x, y = S.elementary(0, 1, a), S.elementary(2, 0, b)
        c = S.comm(x, y)
        assert np.array_equal(c, S.elementary(2, 1, R.neg(R.mul(b, a))))


def test_conjugation_identity_z4():
    S = space("zmod:4")
    cases, fails, wit = check_conjugation_identity(S, parse_ideal(S.R, "(2)"), triples=[(1, 2, 3)])
    assert (cases, fails, wit) == (32, 0, None)


def test_factor_unitriangular_examples():
    S = space("zmod:4")
    I = parse_ideal(S.R, "(2)")
    assert len(factor_unitriangular(S, S.eye, I)) == 0
    U = S.eye.copy()
    U[0, 1] = U[0, 2] = U[1, 2] = 2
    w = factor_unitriangular(S, U, I)
    assert len(w) == 3 and word_parameters_in(w, I)
    assert np.array_equal(w.eval(), U)


@pytest.mark.parametrize("upper", [True, False])
def test_factor_unitriangular_exhaustive(upper):
    S = space("zmod:4")
    I = parse_ideal(S.R, "(2)")
    pos = [(0, 1), (0, 2), (1, 2)] if upper else [(1, 0), (2, 0), (2, 1)]
    count = 0
    for vals in itertools.product(I.elements, repeat=3):
        U = S.eye.copy()
        for (r, c), v in zip(pos, vals):
            U[r, c] = v
        w = factor_unitriangular(S, U, I, upper=upper)
        assert np.array_equal(w.eval(), U) and word_parameters_in(w, I) and len(w) <= 3
        count += 1
    assert count == 8


def test_factor_unitriangular_rejects():
    S = space("zmod:4")
    I = parse_ideal(S.R, "(2)")
    with pytest.raises(ValueError):
        factor_unitriangular(S, S.elementary(0, 1, 1), I)
    with pytest.raises(ValueError):
        factor_unitriangular(S, S.elementary(1, 0, 2), I, upper=True)


def _block_diag(S, x, y):
    n = S.n
    big = MatSpace(S.R, 2 * n)
    out = big.eye.copy()
    out[:n, :n] = S.mul(S.mul(x, y), S.mul(S.inv(x), S.inv(y)))
    return out


def test_whitehead_identity_pair():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(2)")
    w = whitehead_factor(S, S.eye, S.eye, I)
    assert np.array_equal(w.eval(), MatSpace(S.R, 6).eye)


def test_whitehead_elementary_pair():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(2)")
    x, y = S.elementary(0, 1, 2), S.elementary(1, 0, 2)
    w = whitehead_factor(S, x, y, I)
    assert np.array_equal(w.eval(), _block_diag(S, x, y))
    assert word_parameters_in(w, I)
    assert any(isinstance(L, ConjBlock) for L in w)


def test_whitehead_random_pairs():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(2)")
    rng = np.random.default_rng(42)
    for _ in range(20):
        x = random_congruence_element(S, I, rng)
        y = random_congruence_element(S, I, rng)
        w = whitehead_factor(S, x, y, I)
        assert np.array_equal(w.eval(), _block_diag(S, x, y)) and word_parameters_in(w, I)


def test_whitehead_rejects_wrong_level():
    S = space("zmod:8")
    with pytest.raises(ValueError):
        whitehead_factor(S, S.elementary(0, 1, 1), S.eye, parse_ideal(S.R, "(2)"))


def test_rewrite_empty_and_direct():
    S = space("zmod:4")
    w = rewrite_conjugated_generator(ElemWord(S), 1, 2, 2)
    assert w.letters == (ZLet(1, 2, 0, 2),)
    w = rewrite_conjugated_generator(ElemWord(S, [Elem(2, 1, 3)]), 1, 2, 2)
    assert w.letters == (ZLet(1, 2, 3, 2),)


def test_rewrite_random_conjugators():
    S = space("zmod:4")
    R = S.R
    I = parse_ideal(R, "(2)")
    rng = np.random.default_rng(9)
    pairs = list(itertools.permutations(range(1, 4), 2))
    for _ in range(60):
        c = ElemWord(S, [Elem(*pairs[rng.integers(6)], int(rng.integers(4))) for _ in range(rng.integers(0, 7))])
        i, j = pairs[rng.integers(6)]
        alpha = int(rng.choice(I.elements))
        w = rewrite_conjugated_generator(c, i, j, alpha)
        target = S.conj(c.eval(), S.elementary(i - 1, j - 1, alpha))
        assert np.array_equal(w.eval(), target)
        assert all(isinstance(L, ZLet) for L in w) and word_parameters_in(w, I)


def test_rewrite_needs_three_indices():
    S = space("zmod:4", 2)
    with pytest.raises(ValueError):
        rewrite_conjugated_generator(ElemWord(S), 1, 2, 2)


@pytest.mark.parametrize("desc,ideal,order", [
    ("zmod:2", "(1)", 168),
    ("zmod:3", "(1)", 5616),
])
def test_elementary_subgroup_orders(desc, ideal, order):
    S = space(desc)
    I = parse_ideal(S.R, ideal)
    for relative in (True, False):
        assert elementary_subgroup(S, I, relative=relative).group.size == order


def test_relative_group_inside_congruence_level():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(4)")
    E = elementary_subgroup(S, I).group
    assert E.size == 256
    assert all(congruence_member(S, g, I) for g in E.elements)


def test_relative_group_for_n2_uses_normal_closure():
    S = space("zmod:4", 2)
    h = elementary_subgroup(S, parse_ideal(S.R, "(2)"))
    assert h.construction == "normal closure"
    assert h.group.size > elementary_subgroup(S, parse_ideal(S.R, "(2)"), relative=False).group.size


@pytest.mark.parametrize("desc,ideal,n", [("zmod:36", "(2)", 2), ("zmod:16", "(2)", 2), ("zmod:12", "(1)", 3)])
def test_certificate_on_random_products(desc, ideal, n):
    S = space(desc, n)
    I = parse_ideal(S.R, ideal)
    rng = np.random.default_rng(4)
    for _ in range(30):
        g, _gi = random_elementary_word(S, I, 6, rng)
        w = certify_relative_elementary(S, g, I)
        assert w is not None
        assert np.array_equal(w.eval(), g) and word_parameters_in(w, I)


def test_certificate_rejects_diagonal_outside():
    S = space("zmod:8", 3)
    I = parse_ideal(S.R, "(2)")
    # determinant 3: congruent to e mod (2) but not in SL, so not elementary
    assert certify_relative_elementary(S, S.diag([3, 1, 1]), I) is None
    # diag(3, 3^-1, 1) is elementary; the certificate must say so
    d = S.diag([3, 3, 1])
    w = certify_relative_elementary(S, d, I)
    assert w is not None and np.array_equal(w.eval(), d)


def test_certificate_agrees_with_enumeration():
    S = space("zmod:4", 3)
    I = parse_ideal(S.R, "(2)")
    E = elementary_subgroup(S, I).group
    G = random_congruence_batch(S, I, np.random.default_rng(0), 200)
    inside = E.contains_batch(G)
    certs = np.array([certify_relative_elementary(S, g, I) is not None for g in G])
    assert np.array_equal(inside, certs)
