import numpy as np
import pytest

from relcomm.elementary import elementary_alphabet, elementary_subgroup, level_letters, z_generators
from relcomm.groups import (
    MatrixGroup,
    SubgroupHandle,
    brute_force_commutator,
    closure,
    commutator_batch,
    commutator_subgroup,
    normal_closure,
    randomized_containment,
    subgroup_compare,
)
from relcomm.matrices import CapExceeded, MatSpace, congruence_mask, random_congruence_batch
from relcomm.rings import parse_ideal, parse_ring


def space(desc, n=3):
    return MatSpace(parse_ring(desc), n)


def test_closure_of_identity_is_trivial():
    S = space("zmod:2")
    G = closure(S, S.eye[None])
    assert G.size == 1 and G.is_trivial()


def test_sl2_f2_has_order_6():
    S = space("zmod:2", 2)
    G = closure(S, np.stack([S.elementary(0, 1, 1), S.elementary(1, 0, 1)]))
    assert G.size == 6


def test_e3_f2_has_order_168():
    S = space("zmod:2")
    G = closure(S, elementary_alphabet(S))
    assert G.size == 168
    assert G.check_closed(samples=200)


def test_closure_cap():
    S = space("zmod:4")
    with pytest.raises(CapExceeded):
        closure(S, elementary_alphabet(S), cap=1000)


def test_normal_closure_matches_z_letters():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(4)")
    N = normal_closure(S, level_letters(S, I), elementary_alphabet(S))
    Z = closure(S, z_generators(S, I))
    assert subgroup_compare(N, Z)[0] == "equal"
    # e + 4M has determinant 1 + 4 tr(M); the trace-zero half is elementary
    assert N.size == 256


def test_normal_closure_trivial_cases():
    S = space("zmod:4")
    assert normal_closure(S, S.eye[None], elementary_alphabet(S)).size == 1
    g = S.elementary(0, 1, 1)
    assert normal_closure(S, g[None], np.empty((0, 3, 3), dtype=np.int64)).size == 4


def test_commutator_subgroup_perfect_e3_f2():
    S = space("zmod:2")
    A = elementary_alphabet(S)
    E = closure(S, A)
    C = commutator_subgroup(S, A, A)
    assert C.size == 168
    assert subgroup_compare(C, brute_force_commutator(S, E, E))[0] == "equal"


def test_commutator_subgroup_comaximal_z6_trivial():
    S = space("zmod:6")
    I2, I3 = parse_ideal(S.R, "(2)"), parse_ideal(S.R, "(3)")
    C = commutator_subgroup(S, z_generators(S, I2), z_generators(S, I3), elementary_alphabet(S))
    assert C.size == 1


def test_commutator_subgroup_of_trivials():
    S = space("zmod:4")
    assert commutator_subgroup(S, S.eye[None], S.eye[None]).size == 1


def test_commutator_batch_shape_and_values():
    S = space("zmod:4")
    X = np.stack([S.elementary(0, 1, 1), S.elementary(1, 2, 1)])
    C = commutator_batch(S, X, X)
    assert C.shape == (4, 3, 3)
    # [e12(1), e23(1)] = e13(1)
    assert np.array_equal(C[1], S.elementary(0, 2, 1))


@pytest.mark.parametrize("desc,ideal", [("zmod:4", "(2)"), ("zmod:8", "(4)")])
def test_subgroup_compare_level_vs_relative(desc, ideal):
    S = space(desc)
    I = parse_ideal(S.R, ideal)
    E_lvl = elementary_subgroup(S, I, relative=False).group
    E_rel = elementary_subgroup(S, I, relative=True).group
    rel, _ = subgroup_compare(E_lvl, E_rel)
    assert rel in ("equal", "X<Y")
    assert subgroup_compare(closure(S, S.eye[None]), E_rel)[0] == "X<Y"


def test_subgroup_compare_incomparable_with_witness():
    S = space("zmod:2")
    X = closure(S, S.elementary(0, 1, 1)[None])
    Y = closure(S, S.elementary(1, 0, 1)[None])
    rel, wit = subgroup_compare(X, Y)
    assert rel == "incomparable" and not Y.contains_batch(wit[None])[0]


def test_compare_against_predicate_handle():
    S = space("zmod:8")
    I = parse_ideal(S.R, "(2)")
    H = SubgroupHandle("GL(3,Z/8,(2))", S, member=lambda A: congruence_mask(S, A, I))
    X = closure(S, level_letters(S, parse_ideal(S.R, "(4)")))
    assert subgroup_compare(X, H)[0] == "X<Y"


def test_randomized_containment_identity_sampler():
    S = space("zmod:4")
    G = closure(S, S.eye[None])
    assert isinstance(G, MatrixGroup)
    rep = randomized_containment(lambda rng, k: S.identity(k), G, 500, 0)
    assert rep.ok and rep.samples == 500


def test_randomized_containment_commutators_z8():
    S = space("zmod:8")
    I, J = parse_ideal(S.R, "(2)"), parse_ideal(S.R, "(4)")
    target = commutator_subgroup(S, z_generators(S, I), z_generators(S, J))
    zi = z_generators(S, I)

    def sampler(rng, k):
        x = zi[rng.integers(len(zi), size=k)]
        y = random_congruence_batch(S, J, rng, k)
        return S.mul(S.mul(x, y), S.mul(S.inv(x), S.inv(y)))

    rep = randomized_containment(sampler, target, 10_000, seed=3)
    assert rep.ok and rep.failures == 0


def test_randomized_containment_negative_control():
    S = space("zmod:4")
    G = closure(S, level_letters(S, parse_ideal(S.R, "(2)")))
    bad = S.elementary(0, 1, 1)
    rep = randomized_containment(lambda rng, k: np.broadcast_to(bad, (k, 3, 3)), G, 10, 0)
    assert not rep.ok and rep.failures == 10
    assert np.array_equal(rep.witness, bad)


def test_handle_materialize_and_membership():
    S = space("zmod:2")
    h = SubgroupHandle("E", S, gens=elementary_alphabet(S))
    assert h.size is None
    assert h.materialize().size == 168
    assert h.contains_batch(S.eye[None]).all()
    with pytest.raises(CapExceeded):
        SubgroupHandle("empty", S).contains_batch(S.eye[None])
