import itertools

import numpy as np
import pytest

from relcomm.rings import (
    RingError,
    all_ideals,
    central_idempotent_split,
    check_ring_axioms,
    ideal_closure,
    ideal_product,
    ideal_product_plain,
    localize_principal,
    parse_ideal,
    parse_ring,
    quotient_ring,
    verify_stable_rank_one,
    zero_ideal,
)


def _isomorphic(R, S):
    """Brute-force ring isomorphism search (tiny rings only)."""
    if R.size != S.size:
        return False
    for perm in itertools.permutations(range(S.size)):
        f = np.array(perm)
        if f[R.zero] != S.zero or f[R.one] != S.one:
            continue
        X = R.elements()
        a, b = np.meshgrid(X, X, indexing="ij")
        if np.array_equal(f[R.add(a, b)], S.add(f[a], f[b])) and np.array_equal(f[R.mul(a, b)], S.mul(f[a], f[b])):
            return True
    return False


@pytest.mark.parametrize("desc,size,comm", [
    ("zmod:6", 6, True),
    ("zi:1,1", 2, True),
    ("zi:0,2", 4, True),
    ("tri:zmod:2,2", 8, False),
    ("mat:zmod:2,2", 16, False),
    ("prod:zmod:2;zmod:3", 6, True),
    ("quot:zmod:12/4", 4, True),
])
def test_parse_ring_sizes(desc, size, comm):
    R = parse_ring(desc)
    assert R.size == size
    assert R.commutative == comm
    assert check_ring_axioms(R)


def test_gaussian_quotient_of_norm_two_is_f2():
    assert _isomorphic(parse_ring("zi:1,1"), parse_ring("zmod:2"))


def test_triangular_ring_noncommutative_witness():
    T = parse_ring("tri:zmod:2,2")
    X = T.elements()
    a, b = np.meshgrid(X, X, indexing="ij")
    assert (T.mul(a, b) != T.mul(b, a)).any()


@pytest.mark.parametrize("bad", ["zmod:0", "zmod:x", "nope:3", "tri:zmod:2"])
def test_parse_ring_rejects(bad):
    with pytest.raises((RingError, ValueError)):
        parse_ring(bad)


@pytest.mark.parametrize("n,gen,qsize", [(8, "(2)", 2), (12, "(4)", 4), (6, "(0)", 6)])
def test_quotient_sizes(n, gen, qsize):
    R = parse_ring(f"zmod:{n}")
    I = parse_ideal(R, gen)
    Q, pi = quotient_ring(R, I)
    assert Q.size == qsize == R.size // I.size
    # pi is a ring map
    X = R.elements()
    a, b = np.meshgrid(X, X, indexing="ij")
    assert np.array_equal(pi[R.mul(a, b)], Q.mul(pi[a], pi[b]))
    assert np.array_equal(pi[R.add(a, b)], Q.add(pi[a], pi[b]))


def test_quotient_by_zero_is_identity_map():
    R = parse_ring("zmod:5")
    _, pi = quotient_ring(R, zero_ideal(R))
    assert list(pi) == list(range(5))


def test_ideal_closure_examples():
    R8 = parse_ring("zmod:8")
    assert list(ideal_closure(R8, [2]).elements) == [0, 2, 4, 6]
    R6 = parse_ring("zmod:6")
    assert ideal_closure(R6, [2, 3]).is_whole()
    T = parse_ring("tri:zmod:2,2")
    e12 = T.parse("[0,1,0,0]")
    assert sorted(ideal_closure(T, [e12]).elements) == [0, e12]


@pytest.mark.parametrize("n,a,b,expect", [(8, 2, 2, 4), (6, 2, 3, 0), (36, 2, 9, 18), (16, 2, 4, 8)])
def test_sym_product_commutative(n, a, b, expect):
    R = parse_ring(f"zmod:{n}")
    P = ideal_product(ideal_closure(R, [a]), ideal_closure(R, [b]))
    assert P == ideal_closure(R, [expect])


def test_sym_product_contains_both_orders_in_tri():
    T = parse_ring("tri:zmod:2,2")
    ideals = all_ideals(T)
    assert len(ideals) == 5
    strict = 0
    for I, J in itertools.product(ideals, repeat=2):
        P = ideal_product(I, J)
        assert ideal_product_plain(I, J) <= P and ideal_product_plain(J, I) <= P
        strict += ideal_product_plain(I, J) != P
    assert strict > 0


def test_localisation_z12_at_2():
    R = parse_ring("zmod:12")
    L = localize_principal(R, 2)
    assert L.e == 4 and L.ring.size == 3 and L.l == 2
    assert _isomorphic(L.ring, parse_ring("zmod:3"))
    dom = np.array([0, 4, 8])
    assert len(set(L(dom))) == 3


def test_localisation_nilpotent_and_unit():
    assert localize_principal(parse_ring("zmod:8"), 2).ring.size == 1
    L = localize_principal(parse_ring("zmod:6"), 1)
    assert L.ring.size == 6 and list(L(np.arange(6))) == list(range(6))


@pytest.mark.parametrize("desc", ["zmod:4", "zmod:2", "tri:zmod:2,2", "zmod:12", "zi:0,2"])
def test_stable_rank_one(desc):
    ok, wit = verify_stable_rank_one(parse_ring(desc))
    assert ok and wit is None


def test_central_idempotents_z12():
    R = parse_ring("zmod:12")
    assert sorted(central_idempotent_split(R)) == [4, 9]
