"""Finite matrix groups as explicit element sets.

Subgroups are grown with Dimino's coset method: adding a generator s to a
closed subgroup H means collecting right cosets H*r until the union is
closed under right multiplication by every generator.  Each coset is one
batched product, so the cost is dominated by hashing the new elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .matrices import ENUM_CAP, CapExceeded, MatSpace


class MatrixGroup:
    """A materialised subgroup of GL(n, R): element array, key index, generators."""

    def __init__(self, space: MatSpace, name: str = ""):
        self.space = space
        self.name = name
        self._blocks = [space.identity(1)]
        self._elems = None
        self.index = {space.key(space.eye): 0}
        self.gens: list[np.ndarray] = []

    # -- basic queries ----------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.index)

    def __len__(self):
        return self.size

    @property
    def elements(self) -> np.ndarray:
        if self._elems is None or len(self._elems) != self.size:
            self._elems = np.concatenate(self._blocks)
            self._blocks = [self._elems]
        return self._elems

    def generators(self) -> np.ndarray:
        if not self.gens:
            return self.space.identity(1)
        return np.stack(self.gens)

    def __contains__(self, g) -> bool:
        return self.space.key(np.asarray(g)) in self.index

    def contains_batch(self, A) -> np.ndarray:
        idx = self.index
        return np.fromiter((k in idx for k in self.space.keys(A)), dtype=bool, count=len(A))

    def is_trivial(self):
        return self.size == 1

    def key_set(self):
        return set(self.index)

    def __repr__(self):
        return f"<MatrixGroup {self.name or '?'} order={self.size}>"

    # -- growth -----------------------------------------------------------
    def _add_block(self, block, cap):
        keys = self.space.keys(block)
        start = len(self.index)
        for off, k in enumerate(keys):
            self.index[k] = start + off
        self._blocks.append(block)
        if len(self.index) > cap:
            raise CapExceeded(f"group {self.name or ''} exceeds cap {cap}")

    def extend(self, s, cap: int = ENUM_CAP) -> bool:
        """Adjoin the generator s.  Returns False if s was already present."""
        S = self.space
        s = np.asarray(s, dtype=np.int64)
        if S.key(s) in self.index:
            return False
        H = self.elements
        gens = self.gens + [s]
        pending = [s]
        self._add_block(S.mul(H, s), cap)
        while pending:
            reps = np.stack(pending)
            pending = []
            for t in gens:
                Y = S.mul(reps, t)
                for y, k in zip(Y, S.keys(Y)):
                    if k not in self.index:
                        self._add_block(S.mul(H, y), cap)
                        pending.append(y)
        self.gens = gens
        self._elems = None
        return True

    def absorb(self, cands, cap: int = ENUM_CAP) -> list:
        """Adjoin every candidate not yet in the group; return the ones used."""
        cands = np.asarray(cands, dtype=np.int64)
        if cands.ndim == 2:
            cands = cands[None]
        added = []
        while len(cands):
            out = ~self.contains_batch(cands)
            if not out.any():
                break
            cands = cands[out]
            self.extend(cands[0], cap)
            added.append(cands[0])
            cands = cands[1:]
        return added

    # -- derived checks ---------------------------------------------------
    def normalised_by(self, conjugators, chunk: int = 1 << 15):
        """Return None if C G C^{-1} = G for every C, else a witness (C, g)."""
        S = self.space
        E = self.elements
        for C in np.asarray(conjugators, dtype=np.int64):
            Ci = S.inv(C)
            for start in range(0, len(E), chunk):
                X = S.mul(S.mul(C, E[start : start + chunk]), Ci)
                bad = ~self.contains_batch(X)
                if bad.any():
                    return C, E[start + int(np.argmax(bad))]
        return None

    def check_closed(self, samples: int = 1000, seed: int = 0):
        """Spot check (exhaustive for small groups) of product and inverse closure."""
        S = self.space
        E = self.elements
        if self.size <= 100:
            A = np.repeat(E, len(E), axis=0)
            B = np.tile(E, (len(E), 1, 1))
        else:
            rng = np.random.default_rng(seed)
            A = E[rng.integers(0, len(E), samples)]
            B = E[rng.integers(0, len(E), samples)]
        return bool(self.contains_batch(S.mul(A, B)).all() and self.contains_batch(S.inv(E[: min(len(E), 4096)])).all())


def closure(space: MatSpace, gens, cap: int = ENUM_CAP, name: str = "") -> MatrixGroup:
    G = MatrixGroup(space, name)
    if gens is not None and len(gens):
        G.absorb(np.asarray(gens), cap)
    return G


def normal_closure(space: MatSpace, seeds, conjugators, cap: int = ENUM_CAP, name: str = "") -> MatrixGroup:
    """Smallest subgroup containing seeds and stable under each conjugator."""
    G = closure(space, seeds, cap, name)
    C = np.asarray(conjugators, dtype=np.int64)
    if C.ndim == 2:
        C = C[None]
    if len(C) == 0:
        return G
    Ci = space.inv(C)
    queue = list(G.gens)
    while queue:
        g = queue.pop(0)
        X = space.mul(space.mul(C, g), Ci)
        queue.extend(G.absorb(X, cap))
    return G


def commutator_batch(space: MatSpace, X, Y):
    """All [x, y] for x in X, y in Y (|X|*|Y| matrices)."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    Xi, Yi = space.inv(X), space.inv(Y)
    a = np.repeat(np.arange(len(X)), len(Y))
    b = np.tile(np.arange(len(Y)), len(X))
    return space.mul(space.mul(X[a], Y[b]), space.mul(Xi[a], Yi[b]))


def unique_rows(space: MatSpace, A):
    A = np.asarray(A)
    if len(A) == 0:
        return A
    keys = space.keys(A)
    seen, keep = set(), []
    for i, k in enumerate(keys):
        if k not in seen:
            seen.add(k)
            keep.append(i)
    return A[keep]


def commutator_subgroup(space: MatSpace, Hgens, Kgens, conj_alphabet=None, cap: int = ENUM_CAP,
                        extra_seeds=None, name: str = "", chunk: int = 1 << 16) -> MatrixGroup:
    """[H, K] as the normal closure of generator commutators.

    With H = <X>, K = <Y>, the subgroup [H, K] is the normal closure of
    {[x, y]} in <H, K>.  When H and K are both normalised by the group
    generated by conj_alphabet, closing under that alphabet gives the same
    subgroup.  Without an alphabet the generators of H and K are used.
    """
    Hgens = np.asarray(Hgens, dtype=np.int64)
    Kgens = np.asarray(Kgens, dtype=np.int64)
    if conj_alphabet is None:
        conj_alphabet = np.concatenate([Hgens, Kgens])
    G = MatrixGroup(space, name)
    for start in range(0, len(Hgens), max(1, chunk // max(1, len(Kgens)))):
        part = Hgens[start : start + max(1, chunk // max(1, len(Kgens)))]
        G.absorb(unique_rows(space, commutator_batch(space, part, Kgens)), cap)
    if extra_seeds is not None and len(extra_seeds):
        G.absorb(unique_rows(space, extra_seeds), cap)
    C = np.asarray(conj_alphabet, dtype=np.int64)
    Ci = space.inv(C)
    queue = list(G.gens)
    while queue:
        g = queue.pop(0)
        queue.extend(G.absorb(space.mul(space.mul(C, g), Ci), cap))
    return G


def brute_force_commutator(space: MatSpace, H: MatrixGroup, K: MatrixGroup, cap: int = ENUM_CAP,
                           limit: int = 10_000_000, chunk: int = 1 << 18) -> MatrixGroup:
    """Oracle: subgroup generated by all [h, k] over the full element sets."""
    if H.size * K.size > limit:
        raise CapExceeded("all-pairs oracle beyond its limit")
    G = MatrixGroup(space, "oracle")
    Ke = K.elements
    Ki = space.inv(Ke)
    He = H.elements
    step = max(1, chunk // len(Ke))
    for start in range(0, len(He), step):
        h = He[start : start + step]
        hi = space.inv(h)
        a = np.repeat(np.arange(len(h)), len(Ke))
        b = np.tile(np.arange(len(Ke)), len(h))
        C = space.mul(space.mul(h[a], Ke[b]), space.mul(hi[a], Ki[b]))
        G.absorb(unique_rows(space, C), cap)
    return G


# ---------------------------------------------------------------------------
# comparisons and sampling


def _as_mask_fn(target):
    if isinstance(target, MatrixGroup):
        return target.contains_batch
    if isinstance(target, SubgroupHandle):
        return target.contains_batch
    return target


def subgroup_compare(X, Y):
    """Relation between X and Y: 'equal', 'X<Y', 'Y<X' or 'incomparable'.

    X must be materialised; Y may be materialised or predicate-backed (then
    only X <= Y can be decided and 'Y<X' is never reported).
    Returns (relation, witness) with witness an element on a strict side.
    """
    in_y = _as_mask_fn(Y)(X.elements)
    x_le_y = bool(in_y.all())
    wit_x = None if x_le_y else X.elements[int(np.argmin(in_y))]
    if isinstance(Y, MatrixGroup) or (isinstance(Y, SubgroupHandle) and Y.group is not None):
        Yg = Y if isinstance(Y, MatrixGroup) else Y.group
        in_x = X.contains_batch(Yg.elements)
        y_le_x = bool(in_x.all())
        wit_y = None if y_le_x else Yg.elements[int(np.argmin(in_x))]
    else:
        y_le_x, wit_y = None, None
    if x_le_y and y_le_x:
        return "equal", None
    if x_le_y:
        return "X<Y", wit_y
    if y_le_x:
        return "Y<X", wit_x
    return "incomparable", wit_x


@dataclass
class ContainmentReport:
    samples: int
    failures: int
    witness: Optional[np.ndarray] = None

    @property
    def ok(self):
        return self.failures == 0


def randomized_containment(sampler: Callable, target, samples: int, seed: int, batch: int = 1024) -> ContainmentReport:
    """Draw samples from sampler(rng, k) and test membership in target."""
    rng = np.random.default_rng(seed)
    member = _as_mask_fn(target)
    done, fails, witness = 0, 0, None
    while done < samples:
        k = min(batch, samples - done)
        X = np.asarray(sampler(rng, k))
        ok = member(X)
        if not ok.all():
            fails += int((~ok).sum())
            if witness is None:
                witness = X[int(np.argmin(ok))]
        done += k
    return ContainmentReport(samples, fails, witness)


# ---------------------------------------------------------------------------
# handles


@dataclass
class SubgroupHandle:
    """A subgroup known by generators, a membership predicate, or its elements.

    ``normal_in_E`` records that the subgroup is normalised by E(n, R), so
    commutator subgroups with it may be closed under the small elementary
    alphabet.
    """

    name: str
    space: MatSpace
    gens: Optional[np.ndarray] = None
    member: Optional[Callable] = None
    group: Optional[MatrixGroup] = None
    normal_in_E: bool = False
    sampler: Optional[Callable] = None
    construction: str = ""
    meta: dict = field(default_factory=dict)

    def materialize(self, cap: int = ENUM_CAP) -> MatrixGroup:
        if self.group is None:
            if self.gens is None:
                raise CapExceeded(f"{self.name}: no generators to materialise from")
            self.group = closure(self.space, self.gens, cap, self.name)
        return self.group

    def try_materialize(self, cap: int = ENUM_CAP):
        try:
            return self.materialize(cap)
        except CapExceeded:
            return None

    def contains_batch(self, A):
        if self.group is not None:
            return self.group.contains_batch(A)
        if self.member is not None:
            return self.member(np.asarray(A))
        raise CapExceeded(f"{self.name}: membership undecidable without materialisation")

    @property
    def size(self):
        return None if self.group is None else self.group.size
