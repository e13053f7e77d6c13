import numpy as np
import pytest

from relcomm.freegroup import (
    IDENTITIES,
    ONE,
    FreeWord,
    comm,
    conj,
    free_identity_check,
    identity_sides,
    reduce_word,
)
from relcomm.matrices import MatSpace, random_congruence_batch
from relcomm.rings import parse_ring, whole_ideal


def test_reduction_cancels_adjacent_inverses():
    assert reduce_word([("x", 1), ("y", 1), ("y", -1), ("x", -1)]) == ()
    assert reduce_word([("x", 1), ("x", 1)]) == (("x", 1), ("x", 1))


def test_bad_exponent_rejected():
    with pytest.raises(ValueError):
        FreeWord([("x", 2)])


def test_inverse_and_identity():
    x, y = FreeWord.gen("x"), FreeWord.gen("y")
    w = comm(x, y)
    assert w * w.inv() == ONE
    assert len(w) == 4
    assert comm(x, x) == ONE
    assert conj(x, y) == x * y * x.inv()


@pytest.mark.parametrize("ident", sorted(IDENTITIES))
def test_identity_holds(ident):
    assert free_identity_check(ident)


@pytest.mark.parametrize("ident,count", [("C1+", 6), ("C2+", 6), ("C3", 1)])
def test_identity_families(ident, count):
    assert len(identity_sides(ident)) == count


def test_unknown_identity():
    with pytest.raises(ValueError):
        identity_sides("C99")


def test_false_identity_detected():
    x, y = FreeWord.gen("x"), FreeWord.gen("y")
    assert comm(x, y) != comm(y, x)


def _evaluate(word, values, S):
    g = S.eye.copy()
    for s, e in word.letters:
        m = values[s] if e == 1 else S.inv(values[s])
        g = S.mul(g, m)
    return g


@pytest.mark.parametrize("ident", ["C1", "C2", "C3", "C4", "C5", "C8"])
def test_identities_hold_in_gl3_z4(ident):
    # any group is a quotient of the free group: spot-check in GL(3, Z/4)
    S = MatSpace(parse_ring("zmod:4"), 3)
    rng = np.random.default_rng(0)
    lhs, rhs = identity_sides(ident)[0]
    names = sorted({s for s, _ in lhs.letters + rhs.letters})
    for _ in range(20):
        mats = random_congruence_batch(S, whole_ideal(S.R), rng, len(names))
        vals = dict(zip(names, mats))
        assert np.array_equal(_evaluate(lhs, vals, S), _evaluate(rhs, vals, S))
