"""Square matrices over finite rings, batched, plus congruence subgroups.

A matrix over a ring R is an integer array of shape (n, n) holding element
indices; batches have shape (B, n, n).  ``MatSpace`` bundles R and n and
does the arithmetic.  Group algorithms hash matrices through ``keys``,
the canonical byte encoding of the entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rings import (
    FiniteRing,
    Ideal,
    MatrixRing,
    ProductRing,
    RingError,
    ZMod,
    additive_generators,
    central_idempotent_split,
    quotient_ring,
)

ENUM_CAP = 5_000_000


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""


class NotInvertible(ArithmeticError):
    pass


def ring_matmul(R: FiniteRing, A, B):
    """Batched (..., p, q) @ (..., q, r) over R."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if isinstance(R, ZMod):
        return np.matmul(A, B) % R.m
    prod = R.mul(A[..., :, :, None], B[..., None, :, :])
    acc = prod[..., :, 0, :]
    for j in range(1, prod.shape[-2]):
        acc = R.add(acc, prod[..., :, j, :])
    return acc


class MatSpace:
    """n x n matrices over R."""

    def __init__(self, R: FiniteRing, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.R, self.n = R, n
        self.eye = np.full((n, n), R.zero, dtype=np.int64)
        np.fill_diagonal(self.eye, R.one)
        self.dtype = R.dtype

    def __repr__(self):
        return f"MatSpace({self.R.descriptor}, n={self.n})"

    # -- construction ---------------------------------------------------
    def identity(self, batch=None):
        if batch is None:
            return self.eye.copy()
        return np.broadcast_to(self.eye, (batch, self.n, self.n)).copy()

    def zeros(self):
        return np.full((self.n, self.n), self.R.zero, dtype=np.int64)

    def elementary(self, i, j, x):
        """e_ij(x) = e + x * e_ij (i != j)."""
        if i == j:
            raise ValueError("elementary matrix needs i != j")
        g = self.eye.copy()
        g[i, j] = int(x)
        return g

    def elementary_batch(self, i, j, xs):
        xs = np.asarray(xs, dtype=np.int64)
        g = self.identity(len(xs))
        g[:, i, j] = xs
        return g

    def diag(self, entries):
        g = self.zeros()
        for k, x in enumerate(entries):
            g[k, k] = int(x)
        return g

    # -- arithmetic -----------------------------------------------------
    def mul(self, A, B):
        return ring_matmul(self.R, A, B)

    def prod(self, mats):
        out = self.eye.copy()
        for m in mats:
            out = self.mul(out, m)
        return out

    def add(self, A, B):
        return self.R.add(A, B)

    def sub(self, A, B):
        return self.R.sub(A, B)

    def neg(self, A):
        return self.R.neg(A)

    def scale(self, x, A):
        return self.R.mul(int(x), A)

    def inv(self, A):
        """Inverse of a matrix or a batch.  Raises NotInvertible."""
        A = np.asarray(A, dtype=np.int64)
        single = A.ndim == 2
        if single:
            A = A[None]
        out = _batch_inverse(self.R, A)
        return out[0] if single else out

    def conj(self, C, X, Cinv=None):
        """C X C^{-1}."""
        if Cinv is None:
            Cinv = self.inv(C)
        return self.mul(self.mul(C, X), Cinv)

    def comm(self, X, Y, Xinv=None, Yinv=None):
        """[X, Y] = X Y X^{-1} Y^{-1}."""
        if Xinv is None:
            Xinv = self.inv(X)
        if Yinv is None:
            Yinv = self.inv(Y)
        return self.mul(self.mul(X, Y), self.mul(Xinv, Yinv))

    def det(self, A):
        if not self.R.commutative:
            raise RingError("determinant needs a commutative ring")
        cp = charpoly(self.R, A)
        d = cp[..., -1]
        return self.R.neg(d) if self.n % 2 else d

    def is_invertible(self, A):
        A = np.asarray(A, dtype=np.int64)
        single = A.ndim == 2
        if single:
            A = A[None]
        mask = _batch_invertible(self.R, A)
        return bool(mask[0]) if single else mask

    def is_identity(self, A):
        return np.all(A == self.eye, axis=(-2, -1))

    def equal(self, A, B):
        return np.array_equal(np.asarray(A), np.asarray(B))

    # -- encoding -------------------------------------------------------
    def keys(self, A):
        """Canonical byte keys for a batch (list of bytes)."""
        A = np.ascontiguousarray(np.asarray(A).reshape(-1, self.n * self.n).astype(self.dtype))
        width = A.shape[1] * A.itemsize
        # fixed-width 'S' view: trailing-zero stripping keeps keys injective
        return A.view(f"S{width}").ravel().tolist()

    def key(self, A):
        return np.ascontiguousarray(np.asarray(A).astype(self.dtype)).tobytes()

    def pack(self, A):
        return np.asarray(A).astype(self.dtype)

    def fmt(self, A):
        R = self.R
        return "[" + "; ".join(" ".join(R.fmt(x) for x in row) for row in np.asarray(A)) + "]"

    def parse(self, text: str):
        rows = [r for r in text.strip().strip("[]").split(";")]
        vals = [[self.R.parse(t) for t in r.split()] for r in rows]
        A = np.array(vals, dtype=np.int64)
        if A.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix")
        return A

    def reduce(self, A, canon):
        """Entrywise image under a ring map given as an index array."""
        return canon[np.asarray(A, dtype=np.int64)]


# ---------------------------------------------------------------------------
# characteristic polynomial and inverses


def charpoly(R: FiniteRing, A):
    """Coefficients (1, c1, ..., cn) of det(tI - A), division free.

    Berkowitz' recursion on trailing principal submatrices; A may be a
    batch.  R must be commutative.
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[-1]
    batch = A.shape[:-2]
    one = np.full(batch, R.one, dtype=np.int64)
    coeffs = np.stack([one, R.neg(A[..., n - 1, n - 1])], axis=-1)
    for r in range(n - 2, -1, -1):
        m = n - r - 1
        M = A[..., r + 1 :, r + 1 :]
        row = A[..., r : r + 1, r + 1 :]  # (..., 1, m)
        col = A[..., r + 1 :, r : r + 1]  # (..., m, 1)
        t = [one, R.neg(A[..., r, r])]
        v = col
        for _ in range(m):
            t.append(R.neg(ring_matmul(R, row, v)[..., 0, 0]))
            v = ring_matmul(R, M, v)
        t = np.stack(t, axis=-1)  # (..., m+2)
        new = []
        for i in range(m + 2):
            acc = np.full(batch, R.zero, dtype=np.int64)
            for j in range(min(i, m) + 1):
                acc = R.add(acc, R.mul(t[..., i - j], coeffs[..., j]))
            new.append(acc)
        coeffs = np.stack(new, axis=-1)
    return coeffs


def _inverse_commutative(R, A):
    n = A.shape[-1]
    cp = charpoly(R, A)
    eye = np.zeros(A.shape, dtype=np.int64) + R.zero
    idx = np.arange(n)
    eye[..., idx, idx] = R.one
    # Cayley-Hamilton: A (A^{n-1} + c1 A^{n-2} + ... + c_{n-1}) = -c_n
    Bm = eye.copy()
    for k in range(1, n):
        Bm = ring_matmul(R, A, Bm)
        Bm[..., idx, idx] = R.add(Bm[..., idx, idx], cp[..., k][..., None])
    minus_cn = R.neg(cp[..., n])
    if not np.all(R.unit_mask[minus_cn]):
        raise NotInvertible("matrix is not invertible")
    s = R.inverse_table[minus_cn]
    return R.mul(s[..., None, None], Bm)


def _blocks_to_base(R: MatrixRing, A):
    k = R.k
    blocks = R.decode(A)  # (..., n, n, k, k)
    n = A.shape[-1]
    big = np.swapaxes(blocks, -3, -2).reshape(A.shape[:-2] + (n * k, n * k))
    return big


def _base_to_blocks(R: MatrixRing, big, n):
    k = R.k
    blocks = big.reshape(big.shape[:-2] + (n, k, n, k))
    blocks = np.swapaxes(blocks, -3, -2)
    return R.encode(blocks)


def _power_inverse(R, A):
    """Inverse by walking powers; works in any finite ring."""
    n = A.shape[-1]
    out = np.empty_like(A)
    space = MatSpace(R, n)
    for b in range(A.shape[0]):
        g = A[b]
        seen = set()
        prev, p = space.eye, g
        while not np.array_equal(p, space.eye):
            key = space.key(p)
            if key in seen:
                raise NotInvertible("matrix is not invertible")
            seen.add(key)
            prev, p = p, space.mul(p, g)
        out[b] = prev
    return out


def _batch_inverse(R: FiniteRing, A):
    if R.size == 1:
        return A.copy()
    if R.commutative:
        return _inverse_commutative(R, A)
    if isinstance(R, MatrixRing) and R.linear_rep is not None:
        n = A.shape[-1]
        big = _inverse_commutative(R.base, _blocks_to_base(R, A))
        return _base_to_blocks(R, big, n)
    if isinstance(R, ProductRing):
        L, Rt = R.split(A)
        return _batch_inverse(R.left, L) * R.right.size + _batch_inverse(R.right, Rt)
    return _power_inverse(R, A)


def _batch_invertible(R: FiniteRing, A):
    if R.size == 1:
        return np.ones(A.shape[0], dtype=bool)
    if R.commutative:
        n = A.shape[-1]
        cp = charpoly(R, A)
        return R.unit_mask[cp[..., n]]
    if isinstance(R, MatrixRing) and R.linear_rep is not None:
        return _batch_invertible(R.base, _blocks_to_base(R, A))
    if isinstance(R, ProductRing):
        L, Rt = R.split(A)
        return _batch_invertible(R.left, L) & _batch_invertible(R.right, Rt)
    out = np.zeros(A.shape[0], dtype=bool)
    for b in range(A.shape[0]):
        try:
            _power_inverse(R, A[b : b + 1])
            out[b] = True
        except NotInvertible:
            pass
    return out


# ---------------------------------------------------------------------------
# a small value type for interactive use


class Mat:
    """An invertible-or-not matrix bound to its space.  Hashable by encoding."""

    __slots__ = ("space", "a")

    def __init__(self, space: MatSpace, a):
        self.space = space
        self.a = np.asarray(a, dtype=np.int64)

    def __matmul__(self, other):
        return Mat(self.space, self.space.mul(self.a, other.a))

    def inv(self):
        return Mat(self.space, self.space.inv(self.a))

    def __eq__(self, other):
        return isinstance(other, Mat) and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash(self.encoding())

    def encoding(self) -> bytes:
        return self.space.key(self.a)

    def __repr__(self):
        return f"Mat({self.space.fmt(self.a)})"


def mat_inverse(g):
    if isinstance(g, Mat):
        return g.inv()
    raise TypeError("mat_inverse expects a Mat")


# ---------------------------------------------------------------------------
# congruence subgroups


def congruence_mask(space: MatSpace, A, I: Ideal):
    """Batch test: g = e mod I (entries of g - e lie in I)."""
    A = np.asarray(A, dtype=np.int64)
    D = space.sub(A, space.eye)
    return np.all(I.mask[D], axis=(-2, -1))


def congruence_member(space: MatSpace, g, I: Ideal) -> bool:
    return bool(congruence_mask(space, np.asarray(g)[None], I)[0])


def gl_congruence_size_bound(space, I):
    return I.size ** (space.n * space.n)


def gl_congruence_enumerate(space: MatSpace, I: Ideal, cap: int = ENUM_CAP, chunk: int = 1 << 16):
    """All g in GL(n, R, I), as a (N, n, n) array in a fixed order."""
    n2 = space.n * space.n
    total = I.size**n2
    if total > cap:
        raise CapExceeded(f"GL({space.n}, {space.R.descriptor}, {I.fmt()}): {total} candidates > cap {cap}")
    el = I.elements
    k = len(el)
    nil = _is_nil(space.R, I)
    out = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.empty((len(idx), n2), dtype=np.int64)
        for p in range(n2 - 1, -1, -1):
            idx, digits[:, p] = np.divmod(idx, k)
        M = el[digits].reshape(-1, space.n, space.n)
        G = space.add(M, space.eye)
        if not nil:
            G = G[space.is_invertible(G)]
        out.append(G)
    return np.concatenate(out) if out else np.empty((0, space.n, space.n), dtype=np.int64)


def _is_nil(R, I):
    """Every element of I nilpotent (then e + M(I) is automatically invertible)."""
    x = I.elements
    p = x.copy()
    for _ in range(max(1, R.size.bit_length() + 1)):
        p = R.mul(p, p)
    return bool(np.all(p == R.zero))


def embed_stable(space: MatSpace, g, m: int = 1):
    """diag(g, 1_m) in the (n+m) x (n+m) space."""
    big = MatSpace(space.R, space.n + m)
    g = np.asarray(g, dtype=np.int64)
    out = big.identity(g.shape[0]) if g.ndim == 3 else big.identity()
    out[..., : space.n, : space.n] = g
    return out


def random_congruence_element(space: MatSpace, I: Ideal, rng, max_tries: int = 10_000):
    """Uniform element of GL(n, R, I) by rejection from e + M_n(I)."""
    el = I.elements
    for _ in range(max_tries):
        M = el[rng.integers(0, len(el), (space.n, space.n))]
        g = space.add(M, space.eye)
        if space.is_invertible(g):
            return g
    raise RuntimeError("rejection sampling did not produce an invertible matrix")


def random_congruence_batch(space: MatSpace, I: Ideal, rng, count: int):
    el = I.elements
    if count <= 0:
        return np.empty((0, space.n, space.n), dtype=np.int64)
    out = []
    have = 0
    while have < count:
        M = el[rng.integers(0, len(el), (max(16, 2 * (count - have)), space.n, space.n))]
        G = space.add(M, space.eye)
        G = G[space.is_invertible(G)]
        out.append(G)
        have += len(G)
    return np.concatenate(out)[:count]


# ---------------------------------------------------------------------------
# full congruence subgroups


def gl_centre_scalars(R: FiniteRing, n: int):
    """Elements c with c*e central in GL(n, R).

    For n >= 2 a matrix commuting with every e_ij(1) is scalar, and it must
    commute with every e_ij(b), so c is a central unit.  For n = 1 the
    centre is the centre of the unit group.
    """
    X = R.elements()
    units = R.units()
    if n >= 2:
        central = np.array([np.array_equal(R.mul(c, X), R.mul(X, c)) for c in units], dtype=bool)
    else:
        central = np.array([np.array_equal(R.mul(c, units), R.mul(units, c)) for c in units], dtype=bool)
    return units[central] if len(units) else units


@dataclass
class FullCongruence:
    """C(n, R, I): preimage of the centre of GL(n, R/I)."""

    space: MatSpace
    ideal: Ideal
    quotient: FiniteRing
    pi: np.ndarray
    centre: np.ndarray  # indices in the quotient ring

    def mask(self, A):
        A = np.asarray(A, dtype=np.int64)
        Q = self.pi[A]
        n = self.space.n
        d = Q[..., np.arange(n), np.arange(n)]
        off = Q.copy()
        off[..., np.arange(n), np.arange(n)] = self.quotient.zero
        scalar = np.all(off == self.quotient.zero, axis=(-2, -1)) & np.all(d == d[..., :1], axis=-1)
        cmask = np.zeros(self.quotient.size, dtype=bool)
        cmask[self.centre] = True
        return scalar & cmask[d[..., 0]]

    def __contains__(self, g):
        return bool(self.mask(np.asarray(g)[None])[0])

    def scalar_lifts(self):
        """For each central class c, a unit of R lifting it (scalar matrices)."""
        R = self.space.R
        lifts = []
        units = R.units()
        for c in self.centre:
            cand = units[self.pi[units] == c]
            if len(cand) == 0:
                raise RingError("central unit does not lift")
            lifts.append(int(cand[0]))
        return lifts


def full_congruence_subgroup(space: MatSpace, I: Ideal) -> FullCongruence:
    Q, pi = quotient_ring(space.R, I)
    centre = gl_centre_scalars(Q, space.n)
    return FullCongruence(space, I, Q, pi, centre)


# ---------------------------------------------------------------------------
# generating sets of GL(n, R, I)


@lru_cache(maxsize=128)
def _component_data(R: FiniteRing, I: Ideal):
    """Local factors of a commutative R: (idempotent, is_whole, gens, units)."""
    comps = []
    X = R.elements()
    for e in central_idempotent_split(R):
        eR = np.unique(R.mul(e, X))
        eI = np.unique(R.mul(e, I.elements))
        whole = bool(np.isin(e, eI))
        mask = np.zeros(R.size, dtype=bool)
        mask[eI] = True
        gens = additive_generators(R, mask)
        # units of the factor eR, lifted to units of R as e*u + (1 - e)
        f = int(R.sub(R.one, e))
        lifted = R.add(eR, f)
        unit_lifts = lifted[R.unit_mask[lifted]]
        comps.append((e, whole, gens, eR, unit_lifts))
    return comps


def congruence_generators(space: MatSpace, I: Ideal):
    """A generating set of GL(n, R, I) for commutative R.

    R splits as a product of local rings e_k R.  On a factor where I is
    proper it lies in the maximal ideal, so the diagonal of g stays
    invertible and row/column clearing with level-I elementary matrices
    reduces g to a diagonal matrix with entries in 1 + I.  On a factor
    where I is everything, an invertible column always has a unit entry.
    Both reductions are carried out by ``congruence_factor``.
    """
    R = space.R
    if not R.commutative:
        raise RingError("elimination generators need a commutative ring")
    n = space.n
    gens = []
    for e, whole, lgens, eR, ulifts in _component_data(R, I):
        for g in lgens:
            for i, j in itertools.permutations(range(n), 2):
                gens.append(space.elementary(i, j, g))
        if whole:
            dvals = ulifts
        else:
            # units 1 + x with x in eI, embedded in the factor
            one_plus = R.add(R.one, np.flatnonzero(I.mask & np.isin(np.arange(R.size), eR)))
            dvals = one_plus[R.unit_mask[one_plus]]
        for u in dvals:
            if u == R.one:
                continue
            for p in range(n):
                d = space.eye.copy()
                d[p, p] = int(u)
                gens.append(d)
    if not gens:
        gens.append(space.eye.copy())
    return np.stack(gens)


def congruence_factor(space: MatSpace, g, I: Ideal):
    """Write g in GL(n, R, I) as a product of elementary and diagonal matrices.

    Returns a list of matrices (each elementary with parameter in I, or
    diagonal with entries congruent to 1 mod I, component by component)
    whose product is g.  Commutative R only.
    """
    R = space.R
    n = space.n
    g = np.asarray(g, dtype=np.int64)
    factors = []
    for e, whole, _, eR, _ in _component_data(R, I):
        f = int(R.sub(R.one, e))
        # component of g, identity on the other factors
        h = space.add(R.mul(e, g), R.mul(f, space.eye))
        factors.extend(_eliminate_local(space, h, e, f))
    return factors


def _eliminate_local(space, h, e, f):
    R = space.R
    n = space.n
    units = R.unit_mask

    def unit_in_factor(x):
        return bool(units[int(R.add(R.mul(e, x), f))])

    def finv(x):
        # inverse of x in eR, as an element of R
        return int(R.mul(e, R.inv(R.add(R.mul(e, x), f))))

    left, right = [], []
    h = h.copy()
    for c in range(n):
        if not unit_in_factor(h[c, c]):
            r = next((r for r in range(c + 1, n) if unit_in_factor(h[r, c])), None)
            if r is None:
                raise ArithmeticError("elimination failed: no unit pivot")
            h = space.mul(space.elementary(c, r, e), h)
            left.append(space.elementary(c, r, R.neg(e)))
        p = finv(h[c, c])
        for r in range(c + 1, n):
            if h[r, c] != R.zero:
                t = int(R.mul(h[r, c], p))
                h = space.mul(space.elementary(r, c, R.neg(t)), h)
                left.append(space.elementary(r, c, t))
        for k in range(c + 1, n):
            if h[c, k] != R.zero:
                t = int(R.mul(p, h[c, k]))
                h = space.mul(h, space.elementary(c, k, R.neg(t)))
                right.append(space.elementary(c, k, t))
    # h is now diagonal: g_component = left^{-1}... h ...right^{-1}
    diag = []
    for p_ in range(n):
        if h[p_, p_] != R.one:
            d = space.eye.copy()
            d[p_, p_] = h[p_, p_]
            diag.append(d)
    return left + diag + right[::-1]
