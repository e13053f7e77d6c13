import pytest

from relcomm.brackets import (
    BracketTree,
    all_bracketings,
    catalan,
    left_normed,
    parse_bracketing,
    resolve_bracketing,
    right_normed,
)


@pytest.mark.parametrize("m", range(0, 9))
def test_count_is_catalan(m):
    trees = all_bracketings(m)
    assert len(trees) == catalan(m)
    assert len({str(t) for t in trees}) == len(trees)


@pytest.mark.parametrize("m,c", [(1, 1), (2, 2), (3, 5), (4, 14), (8, 1430)])
def test_catalan_values(m, c):
    assert catalan(m) == c


def test_named_trees():
    assert str(left_normed(3)) == "[[[0,1],2],3]"
    assert str(right_normed(3)) == "[0,[1,[2,3]]]"
    assert str(left_normed(0)) == "0"


@pytest.mark.parametrize("text,cut", [("[[0,1],2]", 1), ("[0,[1,2]]", 0), ("[[0,1],[2,3]]", 1), ("[[[0,1],2],3]", 2)])
def test_cut_point(text, cut):
    assert parse_bracketing(text).cut_point == cut


def test_leaf_has_no_cut_point():
    with pytest.raises(ValueError):
        BracketTree.make_leaf(0).cut_point


def test_parse_roundtrip_all_m4():
    for t in all_bracketings(4):
        assert parse_bracketing(str(t), 4) == t


@pytest.mark.parametrize("bad", ["[0,1", "[0,2]", "[[0,1],2]]", "[0 1]", "x", "[1,0]"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_bracketing(bad)


def test_resolve_defaults_and_names():
    assert resolve_bracketing(None, 2) == left_normed(2)
    assert resolve_bracketing("right", 2) == right_normed(2)
    with pytest.raises(ValueError):
        resolve_bracketing("[[0,1],2]", 3)


def test_fold_computes_depth():
    t = parse_bracketing("[[0,1],[2,3]]")
    assert t.fold(lambda k: 0, lambda a, b: 1 + max(a, b)) == 2
    assert t.leaves() == [0, 1, 2, 3]
