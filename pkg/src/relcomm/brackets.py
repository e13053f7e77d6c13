"""Bracketings of multiple commutators as binary trees over leaves 0..m."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Optional, Union


@dataclass(frozen=True)
class BracketTree:
    """A leaf (left = right = None, leaf index set) or a binary node."""

    left: Optional["BracketTree"] = None
    right: Optional["BracketTree"] = None
    leaf: Optional[int] = None

    @classmethod
    def make_leaf(cls, k: int) -> "BracketTree":
        return cls(leaf=k)

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.leaf]
        return self.left.leaves() + self.right.leaves()

    @property
    def cut_point(self) -> int:
        """Last leaf of the left child of the root."""
        if self.is_leaf:
            raise ValueError("a single leaf has no cut point")
        return self.left.leaves()[-1]

    def fold(self, leaf_fn: Callable, node_fn: Callable):
        if self.is_leaf:
            return leaf_fn(self.leaf)
        return node_fn(self.left.fold(leaf_fn, node_fn), self.right.fold(leaf_fn, node_fn))

    def __str__(self):
        if self.is_leaf:
            return str(self.leaf)
        return f"[{self.left},{self.right}]"

    def __repr__(self):
        return f"BracketTree({self})"


def _check(tree: BracketTree, m: int):
    if tree.leaves() != list(range(m + 1)):
        raise ValueError(f"leaves of {tree} are not 0..{m} in order")
    return tree


@lru_cache(maxsize=None)
def _trees(lo: int, hi: int) -> tuple:
    if lo == hi:
        return (BracketTree.make_leaf(lo),)
    out = []
    for h in range(lo, hi):
        for L in _trees(lo, h):
            for Rt in _trees(h + 1, hi):
                out.append(BracketTree(L, Rt))
    return tuple(out)


def all_bracketings(m: int) -> list[BracketTree]:
    """Every bracketing of a commutator with m + 1 entries (ordered by cut point)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return list(_trees(0, m))


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def left_normed(m: int) -> BracketTree:
    t = BracketTree.make_leaf(0)
    for k in range(1, m + 1):
        t = BracketTree(t, BracketTree.make_leaf(k))
    return t


def right_normed(m: int) -> BracketTree:
    t = BracketTree.make_leaf(m)
    for k in range(m - 1, -1, -1):
        t = BracketTree(BracketTree.make_leaf(k), t)
    return t


_TOKEN = re.compile(r"\s*(\[|\]|,|\d+)")


def parse_bracketing(text: str, m: Optional[int] = None) -> BracketTree:
    """Parse ``[[0,1],2]``, or the names ``left`` / ``right`` (need m)."""
    text = text.strip()
    if text in ("left", "right"):
        if m is None:
            raise ValueError("named bracketings need m")
        return left_normed(m) if text == "left" else right_normed(m)
    toks = _TOKEN.findall(text)
    if "".join(toks) != re.sub(r"\s+", "", text):
        raise ValueError(f"bad bracketing {text!r}")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"bad bracketing {text!r}")
        t = toks[pos]
        pos += 1
        if t.isdigit():
            return BracketTree.make_leaf(int(t))
        if t != "[":
            raise ValueError(f"bad bracketing {text!r}")
        a = parse()
        if toks[pos : pos + 1] != [","]:
            raise ValueError(f"bad bracketing {text!r}")
        pos += 1
        b = parse()
        if toks[pos : pos + 1] != ["]"]:
            raise ValueError(f"bad bracketing {text!r}")
        pos += 1
        return BracketTree(a, b)

    tree = parse()
    if pos != len(toks):
        raise ValueError(f"trailing text in bracketing {text!r}")
    return _check(tree, len(tree.leaves()) - 1 if m is None else m)


def resolve_bracketing(spec: Union[str, BracketTree, None], m: int) -> BracketTree:
    if spec is None or spec == "":
        return left_normed(m)
    if isinstance(spec, BracketTree):
        return _check(spec, m)
    return parse_bracketing(spec, m)
