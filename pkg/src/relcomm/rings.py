"""Finite associative rings with identity, given by integer-indexed carriers.

Every ring stores its elements as the integers ``0 .. size-1``.  Arithmetic
is vectorised: ``add``, ``mul`` and ``neg`` accept numpy integer arrays (or
plain ints) and broadcast like ordinary numpy arithmetic.

Rings are built from short text descriptors::

    zmod:12            Z/12
    zi:2,1             Z[i]/(2+i)
    mat:zmod:2,2       2x2 matrices over Z/2
    tri:zmod:2,2       upper triangular 2x2 matrices over Z/2
    prod:zmod:4;zmod:9 direct product
    quot:zmod:12/4     Z/12 modulo the ideal generated by 4
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CAP = 10_000


class RingError(ValueError):
    pass


class RingTooLarge(RingError):
    pass


def _arr(x):
    return np.asarray(x, dtype=np.int64)


class FiniteRing:
    """Base class.  Subclasses implement ``_add``, ``_mul``, ``_neg``."""

    size: int
    descriptor: str = "?"
    zero = 0
    one = 1

    def __init__(self):
        self._units = None
        self._inverse = None
        self._commutative = None

    # -- arithmetic -------------------------------------------------------
    def add(self, a, b):
        return self._add(_arr(a), _arr(b))

    def mul(self, a, b):
        return self._mul(_arr(a), _arr(b))

    def neg(self, a):
        return self._neg(_arr(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar(self, k):
        """Image of the integer k under Z -> R."""
        k = int(k)
        acc, base, sign = self.zero, self.one, k < 0
        k = abs(k)
        while k:
            if k & 1:
                acc = int(self.add(acc, base))
            base = int(self.add(base, base))
            k >>= 1
        return int(self.neg(acc)) if sign else acc

    def elements(self):
        return np.arange(self.size, dtype=np.int64)

    @property
    def dtype(self):
        if self.size <= 256:
            return np.uint8
        if self.size <= 65536:
            return np.uint16
        return np.uint32

    # -- text -------------------------------------------------------------
    def fmt(self, x) -> str:
        return str(int(x))

    def parse(self, s: str) -> int:
        v = int(s.strip())
        if not 0 <= v < self.size:
            raise RingError(f"element {s!r} out of range for {self.descriptor}")
        return v

    def __repr__(self):
        return f"<FiniteRing {self.descriptor} |R|={self.size}>"

    # -- structure --------------------------------------------------------
    @property
    def commutative(self) -> bool:
        if self._commutative is None:
            self._commutative = _check_commutative(self)
        return self._commutative

    def _compute_units(self):
        # x is a unit iff 1 shows up among its powers; walk all powers at once
        n = self.size
        x = self.elements()
        p = np.full(n, self.one, dtype=np.int64)
        prev = p.copy()
        found = np.zeros(n, dtype=bool)
        inverse = np.full(n, -1, dtype=np.int64)
        for _ in range(n + 1):
            prev, p = p, self.mul(p, x)
            hit = (p == self.one) & ~found
            inverse[hit] = prev[hit]
            found |= hit
            if found.all():
                break
        if n == 1:
            found[:] = True
            inverse[:] = 0
        self._units, self._inverse = found, inverse

    @property
    def unit_mask(self) -> np.ndarray:
        if self._units is None:
            self._compute_units()
        return self._units

    @property
    def inverse_table(self) -> np.ndarray:
        if self._inverse is None:
            self._compute_units()
        return self._inverse

    def is_unit(self, x) -> bool:
        return bool(self.unit_mask[int(x)])

    def inv(self, x):
        r = self.inverse_table[_arr(x)]
        if np.any(r < 0):
            raise RingError("not a unit")
        return r

    def units(self) -> np.ndarray:
        return np.flatnonzero(self.unit_mask)

    def pow(self, x, k: int) -> int:
        r, b = self.one, int(x)
        while k:
            if k & 1:
                r = int(self.mul(r, b))
            b = int(self.mul(b, b))
            k >>= 1
        return r

    # rings that embed in matrices over a commutative ring expose this hook
    linear_rep = None


def _check_commutative(R: FiniteRing) -> bool:
    x = R.elements()
    if R.size <= 256:
        a, b = np.meshgrid(x, x, indexing="ij")
        return bool(np.array_equal(R.mul(a, b), R.mul(b, a)))
    rng = np.random.default_rng(0)
    a = rng.integers(0, R.size, 20_000)
    b = rng.integers(0, R.size, 20_000)
    return bool(np.array_equal(R.mul(a, b), R.mul(b, a)))


# ---------------------------------------------------------------------------
# concrete rings


class ZMod(FiniteRing):
    def __init__(self, m: int):
        super().__init__()
        if m < 1:
            raise RingError("modulus must be positive")
        self.m = self.size = m
        self.descriptor = f"zmod:{m}"
        self.one = 1 % m
        self._commutative = True

    def _add(self, a, b):
        return (a + b) % self.m

    def _mul(self, a, b):
        return (a * b) % self.m

    def _neg(self, a):
        return (-a) % self.m

    def parse(self, s):
        return int(s.strip()) % self.m

    def _compute_units(self):
        m = self.m
        inv = np.full(m, -1, dtype=np.int64)
        for x in range(m):
            if math.gcd(x, m) == 1:
                inv[x] = pow(x, -1, m) if m > 1 else 0
        if m == 1:
            inv[0] = 0
        self._units, self._inverse = inv >= 0, inv


def _lattice_hnf(v1, v2):
    """Basis ((p, q), (0, r)) of the lattice spanned by v1, v2 in Z^2."""
    (a, b), (c, d) = v1, v2
    # euclid on first coordinates
    while c != 0:
        t = a // c
        a, b, c, d = c, d, a - t * c, b - t * d
    if a < 0:
        a, b = -a, -b
    d = abs(d)
    if a == 0 or d == 0:
        raise RingError("degenerate Gaussian modulus")
    return (a, b % d), (0, d)


class GaussianQuotient(FiniteRing):
    """Z[i]/(a+bi).  Canonical residues x + y i with 0 <= y < r, 0 <= x < p."""

    def __init__(self, a: int, b: int):
        super().__init__()
        self.a, self.b = a, b
        # the ideal is spanned by a+bi and i(a+bi); reduce in (y, x) order so
        # rational integers keep y = 0 whenever possible
        (r, s), (_, p) = _lattice_hnf((b, a), (a, -b))
        self.p, self.s, self.r = p, s, r
        self.size = p * r
        self.descriptor = f"zi:{a},{b}"
        self._commutative = True
        self.one = int(self._enc(*self._canon(_arr(1), _arr(0))))
        self.zero = 0

    def _canon(self, x, y):
        k = np.floor_divide(y, self.r)
        y = y - k * self.r
        x = (x - k * self.s) % self.p
        return x, y

    def _enc(self, x, y):
        return y * self.p + x

    def _dec(self, z):
        y, x = np.divmod(z, self.p)
        return x, y

    def _add(self, u, v):
        (x1, y1), (x2, y2) = self._dec(u), self._dec(v)
        return self._enc(*self._canon(x1 + x2, y1 + y2))

    def _mul(self, u, v):
        (x1, y1), (x2, y2) = self._dec(u), self._dec(v)
        return self._enc(*self._canon(x1 * x2 - y1 * y2, x1 * y2 + x2 * y1))

    def _neg(self, u):
        x, y = self._dec(u)
        return self._enc(*self._canon(-x, -y))

    def from_pair(self, x, y):
        return int(self._enc(*self._canon(_arr(x), _arr(y))))

    def conj(self, u):
        x, y = self._dec(_arr(u))
        return self._enc(*self._canon(x, -y))

    def has_conjugation(self) -> bool:
        # the ideal (a+bi) is stable under conjugation iff a-bi lies in it
        x, y = self._canon(_arr(self.a), _arr(-self.b))
        return int(x) == 0 and int(y) == 0

    def fmt(self, z):
        x, y = (int(t) for t in self._dec(_arr(z)))
        if y == 0:
            return str(x)
        return f"{x}+{y}i" if x else f"{y}i"

    def parse(self, s):
        s = s.replace(" ", "")
        x = y = 0
        if s.endswith("i"):
            body = s[:-1]
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                x, ys = int(body[:cut]), body[cut:]
            else:
                ys = body
            y = int(ys) if ys not in ("", "+", "-") else int(ys + "1")
        else:
            x = int(s)
        return self.from_pair(x, y)


class _RadixRing(FiniteRing):
    """Elements are tuples over a base ring, packed in mixed radix."""

    def _unpack(self, z, count, base):
        z = _arr(z)
        out = np.empty(z.shape + (count,), dtype=np.int64)
        for k in range(count - 1, -1, -1):
            z, out[..., k] = np.divmod(z, base)
        return out

    def _pack(self, parts, base):
        z = np.zeros(parts.shape[:-1], dtype=np.int64)
        for k in range(parts.shape[-1]):
            z = z * base + parts[..., k]
        return z


class MatrixRing(_RadixRing):
    """k x k matrices (or upper triangular ones) over a base ring."""

    def __init__(self, base: FiniteRing, k: int, triangular=False):
        super().__init__()
        self.base, self.k, self.triangular = base, k, triangular
        if triangular:
            self.slots = [(i, j) for i in range(k) for j in range(i, k)]
        else:
            self.slots = [(i, j) for i in range(k) for j in range(k)]
        self.size = base.size ** len(self.slots)
        self.descriptor = f"{'tri' if triangular else 'mat'}:{base.descriptor},{k}"
        eye = np.full((k, k), base.zero, dtype=np.int64)
        np.fill_diagonal(eye, base.one)
        self.zero = int(self.encode(np.full((k, k), base.zero)))
        self.one = int(self.encode(eye))
        if base.commutative:
            self.linear_rep = (base, k)

    def decode(self, z):
        """Index array -> array of shape (..., k, k) over the base ring."""
        parts = self._unpack(z, len(self.slots), self.base.size)
        out = np.full(parts.shape[:-1] + (self.k, self.k), self.base.zero, dtype=np.int64)
        for s, (i, j) in enumerate(self.slots):
            out[..., i, j] = parts[..., s]
        return out

    def encode(self, m):
        m = _arr(m)
        parts = np.stack([m[..., i, j] for i, j in self.slots], axis=-1)
        return self._pack(parts, self.base.size)

    def _matmul(self, A, B):
        B_ = self.base
        prod = B_.mul(A[..., :, :, None], B[..., None, :, :])
        acc = prod[..., :, 0, :]
        for j in range(1, self.k):
            acc = B_.add(acc, prod[..., :, j, :])
        return acc

    def _add(self, u, v):
        return self.encode(self.base.add(self.decode(u), self.decode(v)))

    def _mul(self, u, v):
        u, v = np.broadcast_arrays(u, v)
        return self.encode(self._matmul(self.decode(u), self.decode(v)))

    def _neg(self, u):
        return self.encode(self.base.neg(self.decode(u)))

    def fmt(self, z):
        m = self.decode(_arr(z))
        return "[" + ",".join(self.base.fmt(m[i, j]) for i in range(self.k) for j in range(self.k)) + "]"

    def parse(self, s):
        s = s.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise RingError(f"matrix literal expected, got {s!r}")
        items = split_top(s[1:-1], ",")
        if len(items) != self.k * self.k:
            raise RingError(f"need {self.k * self.k} entries")
        m = np.array([self.base.parse(t) for t in items], dtype=np.int64).reshape(self.k, self.k)
        if self.triangular and np.any(m[np.tril_indices(self.k, -1)] != self.base.zero):
            raise RingError("entry below the diagonal in a triangular literal")
        return int(self.encode(m))


class ProductRing(_RadixRing):
    def __init__(self, left: FiniteRing, right: FiniteRing):
        super().__init__()
        self.left, self.right = left, right
        self.size = left.size * right.size
        self.descriptor = f"prod:{left.descriptor};{right.descriptor}"
        self.zero = self.pair(left.zero, right.zero)
        self.one = self.pair(left.one, right.one)

    def pair(self, x, y):
        return int(x) * self.right.size + int(y)

    def split(self, z):
        return np.divmod(_arr(z), self.right.size)

    def _lift(self, op, *args):
        parts = [self.split(a) for a in args]
        L = getattr(self.left, op)(*[p[0] for p in parts])
        Rr = getattr(self.right, op)(*[p[1] for p in parts])
        return L * self.right.size + Rr

    def _add(self, u, v):
        return self._lift("add", u, v)

    def _mul(self, u, v):
        return self._lift("mul", u, v)

    def _neg(self, u):
        return self._lift("neg", u)

    def fmt(self, z):
        x, y = self.split(z)
        return f"({self.left.fmt(x)};{self.right.fmt(y)})"

    def parse(self, s):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise RingError(f"pair literal '(x;y)' expected, got {s!r}")
        a, b = split_top(s[1:-1], ";")
        return self.pair(self.left.parse(a), self.right.parse(b))


class EmbeddedRing(FiniteRing):
    """A ring whose elements are a listed subset of a host ring.

    ``canon`` maps every host element to an index of this ring; for
    quotients it is the coset map, for corner rings eR it is -1 outside.
    """

    def __init__(self, host: FiniteRing, reps, canon, one_host, descriptor):
        super().__init__()
        self.host = host
        self.reps = _arr(reps)
        self.canon = _arr(canon)
        self.size = len(self.reps)
        self.descriptor = descriptor
        self.zero = int(self.canon[host.zero])
        self.one = int(self.canon[one_host])

    def _add(self, u, v):
        return self.canon[self.host.add(self.reps[u], self.reps[v])]

    def _mul(self, u, v):
        return self.canon[self.host.mul(self.reps[u], self.reps[v])]

    def _neg(self, u):
        return self.canon[self.host.neg(self.reps[u])]

    def fmt(self, z):
        return self.host.fmt(self.reps[int(z)])

    def parse(self, s):
        v = int(self.canon[self.host.parse(s)])
        if v < 0:
            raise RingError(f"{s!r} is not an element of {self.descriptor}")
        return v

    @property
    def commutative(self):
        if self._commutative is None:
            self._commutative = True if self.host.commutative else _check_commutative(self)
        return self._commutative


# ---------------------------------------------------------------------------
# descriptors


def split_top(s: str, sep: str):
    """Split on ``sep`` outside of brackets and parentheses."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t.strip() for t in out]


def _strip_parens(s):
    s = s.strip()
    while s.startswith("(") and s.endswith(")"):
        depth = 0
        for k, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and k < len(s) - 1:
                return s
        s = s[1:-1].strip()
    return s


def parse_ring(desc: str, cap: int = DEFAULT_CAP, validate: bool = True) -> FiniteRing:
    """Build a ring from its descriptor, refusing carriers larger than ``cap``."""
    R = _parse_ring(_strip_parens(desc), cap)
    if R.size > cap:
        raise RingTooLarge(f"{desc}: carrier of size {R.size} exceeds cap {cap}")
    if validate:
        check_ring_axioms(R)
    return R


@functools.lru_cache(maxsize=64)
def _parse_ring(desc: str, cap: int) -> FiniteRing:
    kind, _, rest = desc.partition(":")
    kind = kind.strip()
    try:
        if kind == "zmod":
            return ZMod(int(rest))
        if kind == "zi":
            a, b = (int(t) for t in rest.split(","))
            if a * a + b * b > cap:
                raise RingTooLarge(f"{desc}: carrier exceeds cap {cap}")
            return GaussianQuotient(a, b)
        if kind in ("mat", "tri"):
            base_s, _, k = rest.rpartition(",")
            base = _parse_ring(_strip_parens(base_s), cap)
            k = int(k)
            slots = k * (k + 1) // 2 if kind == "tri" else k * k
            if base.size ** slots > cap:
                raise RingTooLarge(f"{desc}: carrier exceeds cap {cap}")
            return MatrixRing(base, k, triangular=(kind == "tri"))
        if kind == "prod":
            parts = split_top(rest, ";")
            if len(parts) < 2:
                raise RingError("prod needs two factors")
            rings = [_parse_ring(_strip_parens(p), cap) for p in parts]
            R = rings[0]
            for S in rings[1:]:
                if R.size * S.size > cap:
                    raise RingTooLarge(f"{desc}: carrier exceeds cap {cap}")
                R = ProductRing(R, S)
            return R
        if kind == "quot":
            base_s, _, gens = rest.rpartition("/")
            base = _parse_ring(_strip_parens(base_s), cap)
            I = ideal_closure(base, parse_elements(base, gens))
            Q, _ = quotient_ring(base, I)
            Q.descriptor = desc
            return Q
    except (TypeError, ValueError) as exc:
        if isinstance(exc, RingError):
            raise
        raise RingError(f"bad ring descriptor {desc!r}: {exc}") from None
    raise RingError(f"unknown ring kind {kind!r} in {desc!r}")


def parse_elements(R: FiniteRing, text: str):
    text = text.strip()
    if not text:
        return []
    return [R.parse(t) for t in split_top(text, ",")]


def check_ring_axioms(R: FiniteRing, samples: int = 10_000, seed: int = 0):
    """Associativity, distributivity and identity laws.

    Exhaustive over all triples for carriers of size <= 256 (in chunks),
    sampled otherwise.  Raises RingError on the first violation.
    """
    n = R.size
    x = R.elements()
    if not (np.all(R.mul(R.one, x) == x) and np.all(R.mul(x, R.one) == x)):
        raise RingError(f"{R.descriptor}: identity law fails")
    if not np.all(R.add(R.zero, x) == x) or not np.all(R.add(x, R.neg(x)) == R.zero):
        raise RingError(f"{R.descriptor}: additive group laws fail")

    def check(a, b, c):
        if not np.array_equal(R.mul(R.mul(a, b), c), R.mul(a, R.mul(b, c))):
            raise RingError(f"{R.descriptor}: multiplication not associative")
        if not np.array_equal(R.add(R.add(a, b), c), R.add(a, R.add(b, c))):
            raise RingError(f"{R.descriptor}: addition not associative")
        if not np.array_equal(R.mul(a, R.add(b, c)), R.add(R.mul(a, b), R.mul(a, c))):
            raise RingError(f"{R.descriptor}: left distributivity fails")
        if not np.array_equal(R.mul(R.add(a, b), c), R.add(R.mul(a, c), R.mul(b, c))):
            raise RingError(f"{R.descriptor}: right distributivity fails")
        if not np.array_equal(R.add(a, b), R.add(b, a)):
            raise RingError(f"{R.descriptor}: addition not commutative")

    if n <= 256:
        a, b = (t.ravel() for t in np.meshgrid(x, x, indexing="ij"))
        for c0 in range(0, n, max(1, 2**20 // (n * n))):
            for c in range(c0, min(n, c0 + max(1, 2**20 // (n * n)))):
                check(a, b, np.full_like(a, c))
    else:
        rng = np.random.default_rng(seed)
        a, b, c = (rng.integers(0, n, samples) for _ in range(3))
        check(a, b, c)
    return True


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True, eq=False)
class Ideal:
    ring: FiniteRing
    mask: np.ndarray = field(repr=False)

    @property
    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, x):
        return bool(self.mask[int(x)])

    def __eq__(self, other):
        return isinstance(other, Ideal) and other.ring is self.ring and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __le__(self, other):
        return bool(np.all(~self.mask | other.mask))

    def is_zero(self):
        return self.size == 1

    def is_whole(self):
        return bool(self.mask[self.ring.one])

    def additive_generators(self):
        return additive_generators(self.ring, self.mask)

    def fmt(self):
        gens = self.additive_generators()
        return "(" + ",".join(self.ring.fmt(g) for g in gens) + ")" if gens else "(0)"

    def __repr__(self):
        return f"Ideal{self.fmt()} in {self.ring.descriptor}"


def _add_to_span(R, mask, g):
    """Mask of the additive subgroup generated by mask and g."""
    if mask[g]:
        return mask
    cur = np.flatnonzero(mask)
    out = mask.copy()
    step = int(g)
    while not mask[step]:
        out[R.add(cur, step)] = True
        step = int(R.add(step, g))
    return out


def additive_span(R: FiniteRing, gens) -> np.ndarray:
    mask = np.zeros(R.size, dtype=bool)
    mask[R.zero] = True
    for g in gens:
        mask = _add_to_span(R, mask, int(g))
    return mask


def additive_generators(R: FiniteRing, mask) -> list[int]:
    """A small additive generating set of the subgroup given by mask (greedy)."""
    span = np.zeros(R.size, dtype=bool)
    span[R.zero] = True
    gens = []
    # prefer elements of large additive order so the set stays short
    cand = np.flatnonzero(mask)
    for g in cand:
        if not span[g]:
            gens.append(int(g))
            span = _add_to_span(R, span, int(g))
            if np.array_equal(span, mask):
                break
    return gens


def ideal_closure(R: FiniteRing, gens) -> Ideal:
    """Smallest two-sided ideal containing gens."""
    mask = additive_span(R, gens)
    X = R.elements()
    while True:
        basis = additive_generators(R, mask)
        new = mask.copy()
        for g in basis:
            for prod in (R.mul(X, g), R.mul(g, X)):
                for h in np.unique(prod):
                    if not new[h]:
                        new = _add_to_span(R, new, int(h))
        if np.array_equal(new, mask):
            return Ideal(R, mask)
        mask = new


def parse_ideal(R: FiniteRing, text: str) -> Ideal:
    """Two-sided ideal generated by a comma list, e.g. ``(6)`` or ``2, 3``."""
    inner = _strip_parens(text)
    try:
        gens = parse_elements(R, inner) if inner.strip() else []
    except (ValueError, RingError):
        gens = parse_elements(R, text)
    return ideal_closure(R, gens)


def zero_ideal(R):
    return ideal_closure(R, [])


def whole_ideal(R):
    return ideal_closure(R, [R.one])


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    R = I.ring
    return ideal_closure(R, I.additive_generators() + J.additive_generators())


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    """Symmetrised product IJ + JI.  Equals IJ for commutative rings."""
    R = I.ring
    gi, gj = I.elements, J.elements
    a, b = np.meshgrid(gi, gj, indexing="ij")
    prods = np.unique(np.concatenate([R.mul(a, b).ravel(), R.mul(b, a).ravel()]))
    return ideal_closure(R, prods)


def ideal_product_plain(I: Ideal, J: Ideal) -> Ideal:
    """The ideal IJ (additive span of products ij)."""
    R = I.ring
    a, b = np.meshgrid(I.elements, J.elements, indexing="ij")
    return ideal_closure(R, np.unique(R.mul(a, b)))


def all_ideals(R: FiniteRing, limit: int = 256) -> list[Ideal]:
    """Every two-sided ideal, found as sums of principal ones.  Small rings only."""
    if R.size > limit:
        raise RingTooLarge("ideal enumeration only for small rings")
    seen = {}
    principal = [ideal_closure(R, [x]) for x in range(R.size)]
    frontier = []
    for P in principal:
        key = P.mask.tobytes()
        if key not in seen:
            seen[key] = P
            frontier.append(P)
    while frontier:
        nxt = []
        for A in frontier:
            for P in principal:
                S = ideal_closure(R, A.additive_generators() + P.additive_generators())
                key = S.mask.tobytes()
                if key not in seen:
                    seen[key] = S
                    nxt.append(S)
        frontier = nxt
    return sorted(seen.values(), key=lambda I: (I.size, I.mask.tobytes()))


# ---------------------------------------------------------------------------
# quotients and localisation


def quotient_ring(R: FiniteRing, I: Ideal):
    """Return (R/I, pi) where pi is an index array sending R onto R/I."""
    canon = np.full(R.size, -1, dtype=np.int64)
    reps = []
    Iel = I.elements
    for x in range(R.size):
        if canon[x] < 0:
            canon[R.add(Iel, x)] = len(reps)
            reps.append(x)
    Q = EmbeddedRing(R, reps, canon, R.one, f"quot:{R.descriptor}/{I.fmt()[1:-1]}")
    return Q, canon


@dataclass
class Localisation:
    ring: FiniteRing  # eR with identity e
    e: int  # idempotent power of s, as an element of the host ring
    k: int
    d: int
    l: int  # least l with F_s injective on s^l R
    fs: np.ndarray  # host element -> index in ``ring``

    def __call__(self, a):
        return self.fs[_arr(a)]


def localize_principal(R: FiniteRing, s: int) -> Localisation:
    """Localisation of a finite ring at the powers of a central element s.

    The powers of s are eventually periodic: s^k = s^(k+d).  The unique
    idempotent e among them makes eR a ring with identity e, and the
    canonical map is a -> ea.
    """
    s = int(s)
    X = R.elements()
    if not np.array_equal(R.mul(s, X), R.mul(X, s)):
        raise RingError("localisation needs a central element")
    seen = {}
    p, j = s, 1
    while p not in seen:
        seen[p] = j
        p, j = int(R.mul(p, s)), j + 1
    k, d = seen[p], j - seen[p]
    t = ((k + d - 1) // d) * d  # multiple of d that is >= k
    e = R.pow(s, t)
    eR = np.unique(R.mul(e, X))
    canon = np.full(R.size, -1, dtype=np.int64)
    canon[eR] = np.arange(len(eR))
    ring = EmbeddedRing(R, eR, canon, e, f"loc:{R.descriptor}@{R.fmt(s)}")
    ring._commutative = R.commutative or None
    fs = canon[R.mul(e, X)]
    # smallest l with a -> ea injective on s^l R
    l, sl = 0, R.one
    while True:
        dom = np.unique(R.mul(sl, X))
        if len(np.unique(fs[dom])) == len(dom):
            break
        l, sl = l + 1, int(R.mul(sl, s))
    return Localisation(ring, e, k, d, l, fs)


def verify_stable_rank_one(R: FiniteRing):
    """Check sr(R) = 1: for each unimodular (a1, a2) some a1 + a2 b is a unit.

    Unimodular means a1 R + a2 R = R.  Returns (ok, witness) where witness
    is a failing pair or None.
    """
    X = R.elements()
    units = R.unit_mask
    right = {}

    def rideal(a):
        if a not in right:
            m = np.zeros(R.size, dtype=bool)
            m[R.mul(a, X)] = True
            right[a] = m
        return right[a]

    sums = {}
    for a1 in range(R.size):
        m1 = rideal(a1)
        for a2 in range(R.size):
            m2 = rideal(a2)
            key = (m1.tobytes(), m2.tobytes())
            if key not in sums:
                e1, e2 = np.flatnonzero(m1), np.flatnonzero(m2)
                sums[key] = bool(np.any(R.add(e1[:, None], e2[None, :]) == R.one))
            if not sums[key]:
                continue
            if not units[R.add(a1, R.mul(a2, X))].any():
                return False, (a1, a2)
    return True, None


def idempotents(R: FiniteRing) -> np.ndarray:
    X = R.elements()
    return X[R.mul(X, X) == X]


def central_idempotent_split(R: FiniteRing) -> list[int]:
    """Primitive central idempotents of a commutative ring (local factors)."""
    if not R.commutative:
        raise RingError("splitting implemented for commutative rings only")
    idem = [int(e) for e in idempotents(R) if e != R.zero]
    prims = []
    for e in idem:
        # primitive: no nonzero idempotent f != e with fe = f
        if not any(f != e and int(R.mul(f, e)) == f for f in idem):
            prims.append(e)
    return sorted(prims)
