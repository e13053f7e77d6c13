"""Form rings, form ideals and hyperbolic unitary groups.

Hyperbolic basis order is e_1..e_n, e_-n..e_-1; index i in Omega sits at
position i-1 for i > 0 and 2n+i for i < 0.  The sesquilinear form is
f(u, v) = sum_i conj(u_i) v_-i, h = f + lambda * conj(f) and q(u) = f(u, u)
modulo Lambda.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .groups import (
    MatrixGroup,
    SubgroupHandle,
    closure,
    commutator_batch,
    commutator_subgroup,
    normal_closure,
    randomized_containment,
    subgroup_compare,
)
from .matrices import ENUM_CAP, CapExceeded, MatSpace, congruence_mask, gl_congruence_enumerate
from .rings import (
    FiniteRing,
    GaussianQuotient,
    Ideal,
    ProductRing,
    RingError,
    _add_to_span,
    additive_generators,
    additive_span,
    ideal_closure,
    ideal_product,
    parse_elements,
    parse_ring,
    split_top,
    whole_ideal,
    zero_ideal,
)


class FormError(ValueError):
    pass


def _closure_twisted(R, inv, seed_mask, actors):
    """Additive closure of seed under x -> a x conj(a) for a in actors."""
    mask = seed_mask.copy()
    while True:
        new = mask.copy()
        for g in additive_generators(R, mask):
            imgs = R.mul(R.mul(actors, g), inv[actors])
            for h in np.unique(imgs):
                if not new[h]:
                    new = _add_to_span(R, new, int(h))
        if np.array_equal(new, mask):
            return mask
        mask = new


def _span_of(R, values):
    return additive_span(R, np.unique(np.asarray(values, dtype=np.int64)))


# ---------------------------------------------------------------------------
# form rings


@dataclass(eq=False)
class FormRing:
    ring: FiniteRing
    inv: np.ndarray  # involution as a lookup table
    lam: int
    Lambda: np.ndarray  # mask
    inv_name: str = "table"
    descriptor: str = ""
    Lmin: np.ndarray = field(default=None, repr=False)
    Lmax: np.ndarray = field(default=None, repr=False)
    R0: np.ndarray = field(default=None, repr=False)

    def bar(self, x):
        return self.inv[np.asarray(x, dtype=np.int64)]

    def lam_pow(self, k: int) -> int:
        """lambda^k, k possibly negative (lambda^-1 = conj(lambda))."""
        base = self.lam if k >= 0 else int(self.inv[self.lam])
        return self.ring.pow(base, abs(k))

    def long_root_mask(self, i: int, param_mask=None) -> np.ndarray:
        """Admissible parameters lambda^{-(eps(i)+1)/2} * P for T_{i,-i}, with P = Lambda by default."""
        R = self.ring
        P = self.Lambda if param_mask is None else param_mask
        eps = 1 if i > 0 else -1
        c = self.lam_pow(-(eps + 1) // 2)
        out = np.zeros(R.size, dtype=bool)
        out[R.mul(c, np.flatnonzero(P))] = True
        return out

    def __repr__(self):
        return f"FormRing({self.descriptor or self.ring.descriptor})"


def _involution_table(R: FiniteRing, spec: str) -> np.ndarray:
    X = R.elements()
    if spec == "trivial":
        if not R.commutative:
            raise FormError("the identity map is an involution only on commutative rings")
        return X.copy()
    if spec == "conj":
        if not isinstance(R, GaussianQuotient) or not R.has_conjugation():
            raise FormError("complex conjugation needs a zi ring whose ideal is conjugation stable")
        return np.asarray(R.conj(X), dtype=np.int64)
    if spec == "swap":
        if not isinstance(R, ProductRing) or R.left.descriptor != R.right.descriptor or not R.left.commutative:
            raise FormError("swap needs prod:S;S over a commutative S")
        a, b = R.split(X)
        return b * R.right.size + a
    # explicit table: comma separated images of 0..size-1
    vals = [int(t) for t in spec.replace(" ", "").split(",")]
    if len(vals) != R.size:
        raise FormError("involution table has the wrong length")
    return np.asarray(vals, dtype=np.int64)


def check_involution(R: FiniteRing, inv: np.ndarray):
    """Return None if inv is an additive anti-multiplicative involution, else a witness."""
    X = R.elements()
    if not np.array_equal(inv[inv], X):
        return ("order", int(np.argmax(inv[inv] != X)))
    a, b = (t.ravel() for t in np.meshgrid(X, X, indexing="ij"))
    bad = inv[R.add(a, b)] != R.add(inv[a], inv[b])
    if bad.any():
        k = int(np.argmax(bad))
        return ("additive", int(a[k]), int(b[k]))
    bad = inv[R.mul(a, b)] != R.mul(inv[b], inv[a])
    if bad.any():
        k = int(np.argmax(bad))
        return ("anti-multiplicative", int(a[k]), int(b[k]))
    return None


def _centre(R):
    X = R.elements()
    a, b = (t.ravel() for t in np.meshgrid(X, X, indexing="ij"))
    ok = (R.mul(a, b) == R.mul(b, a)).reshape(len(X), len(X)).all(axis=1)
    return X[ok]


def _subring(R, gens):
    mask = additive_span(R, list(gens) + [R.one])
    while True:
        el = np.flatnonzero(mask)
        a, b = (t.ravel() for t in np.meshgrid(el, el, indexing="ij"))
        new = mask.copy()
        for h in np.unique(R.mul(a, b)):
            if not new[h]:
                new = _add_to_span(R, new, int(h))
        if np.array_equal(new, mask):
            return mask
        mask = new


def make_form_ring(R: FiniteRing, involution="trivial", lam=None, Lambda="min", name="") -> FormRing:
    """Validate a form ring (A, Lambda) with symmetry lam.

    Lambda is 'min', 'max' or a list of generators; the form parameter is
    the smallest one containing Lambda_min and the generators.
    """
    inv = _involution_table(R, involution) if isinstance(involution, str) else np.asarray(involution, dtype=np.int64)
    wit = check_involution(R, inv)
    if wit is not None:
        raise FormError(f"involution axiom fails: {wit}")
    lam = R.one if lam is None else int(lam)
    X = R.elements()
    if not np.array_equal(R.mul(lam, X), R.mul(X, lam)):
        raise FormError("lambda must be central")
    if R.mul(lam, inv[lam]) != R.one:
        raise FormError("lambda * conj(lambda) != 1")
    Lmin = _span_of(R, R.sub(X, R.mul(lam, inv[X])))
    Lmax = np.zeros(R.size, dtype=bool)
    Lmax[X[X == R.neg(R.mul(lam, inv[X]))]] = True
    if isinstance(Lambda, str) and Lambda == "max":
        L = Lmax.copy()
    else:
        gens = [] if (isinstance(Lambda, str) and Lambda == "min") else list(Lambda)
        L = _closure_twisted(R, inv, _span_of(R, list(np.flatnonzero(Lmin)) + gens), X)
    if np.any(L & ~Lmax):
        raise FormError("form parameter escapes Lambda_max")
    FR = FormRing(R, inv, lam, L, involution if isinstance(involution, str) else "table",
                  name or R.descriptor, Lmin, Lmax)
    Z = _centre(R)
    FR.R0 = _subring(R, np.unique(R.mul(Z, inv[Z])))
    problems = validate_form_ring(FR)
    if problems:
        raise FormError("; ".join(problems))
    return FR


def validate_form_ring(FR: FormRing) -> list:
    """List of violated axioms (empty when the form ring is valid)."""
    R, inv, L = FR.ring, FR.inv, FR.Lambda
    X = R.elements()
    out = []
    if check_involution(R, inv) is not None:
        out.append("involution")
    if R.mul(FR.lam, inv[FR.lam]) != R.one:
        out.append("lambda conj(lambda) = 1")
    if np.any(FR.Lmin & ~L) or np.any(L & ~FR.Lmax):
        out.append("Lambda_min <= Lambda <= Lambda_max")
    el = np.flatnonzero(L)
    a, b = (t.ravel() for t in np.meshgrid(el, el, indexing="ij"))
    if not L[R.add(a, b)].all():
        out.append("Lambda additive")
    a, l = (t.ravel() for t in np.meshgrid(X, el, indexing="ij"))
    if not L[R.mul(R.mul(a, l), inv[a])].all():
        out.append("a Lambda conj(a) <= Lambda")
    r0 = np.flatnonzero(FR.R0) if FR.R0 is not None else np.array([R.one])
    r, l = (t.ravel() for t in np.meshgrid(r0, el, indexing="ij"))
    if not L[R.mul(r, l)].all():
        out.append("Lambda is an R0-module")
    return out


_FORM_KEYS = ("inv", "lambda", "Lambda")


def parse_form_ring(desc: str) -> FormRing:
    """``form:<ringspec>;inv=<trivial|conj|swap|t0,t1,...>;lambda=<elt>;Lambda=<min|max|gens>``."""
    if not desc.startswith("form:"):
        raise FormError("form descriptor must start with 'form:'")
    body = desc[len("form:"):]
    m = re.search(r";(inv|lambda|Lambda)=", body)
    ring_s = body if m is None else body[: m.start()]
    opts = {"inv": "trivial", "lambda": None, "Lambda": "min"}
    if m is not None:
        rest = body[m.start() + 1 :]
        for part in re.split(r";(?=(?:inv|lambda|Lambda)=)", rest):
            k, _, v = part.partition("=")
            if k not in _FORM_KEYS:
                raise FormError(f"unknown form option {k!r}")
            opts[k] = v.strip()
    R = parse_ring(ring_s)
    lam = R.one if opts["lambda"] is None else R.parse(opts["lambda"])
    L = opts["Lambda"]
    if L not in ("min", "max"):
        L = parse_elements(R, L)
    return make_form_ring(R, opts["inv"], lam, L, name=desc)


# ---------------------------------------------------------------------------
# form ideals


@dataclass(eq=False)
class FormIdeal:
    form: FormRing
    I: Ideal
    Gamma: np.ndarray  # mask

    def gamma_elements(self):
        return np.flatnonzero(self.Gamma)

    def __eq__(self, other):
        return self.I == other.I and np.array_equal(self.Gamma, other.Gamma)

    def fmt(self):
        R = self.form.ring
        g = additive_generators(R, self.Gamma)
        return f"({self.I.fmt()},{{{','.join(R.fmt(x) for x in g) or '0'}}})"

    def __repr__(self):
        return f"FormIdeal{self.fmt()}"


def gamma_min(FR: FormRing, I: Ideal) -> np.ndarray:
    R, inv = FR.ring, FR.inv
    el = I.elements
    parts = list(R.sub(el, R.mul(FR.lam, inv[el])))
    L = np.flatnonzero(FR.Lambda)
    x, a = (t.ravel() for t in np.meshgrid(el, L, indexing="ij"))
    parts += list(R.mul(R.mul(x, a), inv[x]))
    return _span_of(R, parts)


def gamma_max(FR: FormRing, I: Ideal) -> np.ndarray:
    return I.mask & FR.Lambda


def _twist_span(FR, xs, gam_mask):
    R, inv = FR.ring, FR.inv
    g = np.flatnonzero(gam_mask)
    x, y = (t.ravel() for t in np.meshgrid(np.asarray(xs), g, indexing="ij"))
    return list(R.mul(R.mul(x, y), inv[x]))


def make_form_ideal(FR: FormRing, I: Ideal, Gamma="max") -> FormIdeal:
    """Form ideal (I, Gamma); Gamma is 'min', 'max' or a generator list."""
    R = FR.ring
    if not np.array_equal(I.mask[FR.inv[I.elements]], np.ones(I.size, bool)):
        raise FormError("ideal is not involution invariant")
    gmin, gmax = gamma_min(FR, I), gamma_max(FR, I)
    if isinstance(Gamma, str) and Gamma == "max":
        G = gmax.copy()
    else:
        gens = [] if (isinstance(Gamma, str) and Gamma == "min") else list(Gamma)
        G = _closure_twisted(R, FR.inv, _span_of(R, list(np.flatnonzero(gmin)) + gens), R.elements())
    P = FormIdeal(FR, I, G)
    problems = validate_form_ideal(P)
    if problems:
        raise FormError("; ".join(problems))
    return P


def validate_form_ideal(P: FormIdeal) -> list:
    FR, R = P.form, P.form.ring
    out = []
    gmin, gmax = gamma_min(FR, P.I), gamma_max(FR, P.I)
    if np.any(gmin & ~P.Gamma) or np.any(P.Gamma & ~gmax):
        out.append("Gamma_min(I) <= Gamma <= Gamma_max(I)")
    if not np.array_equal(additive_span(R, np.flatnonzero(P.Gamma)), P.Gamma):
        out.append("Gamma additive")
    X = R.elements()
    if not P.Gamma[_twist_span(FR, X, P.Gamma)].all():
        out.append("a Gamma conj(a) <= Gamma")
    return out


def parse_form_ideal(FR: FormRing, text: str) -> FormIdeal:
    """``fideal:<gens>;Gamma=<gens|min|max>``."""
    body = text[len("fideal:"):] if text.startswith("fideal:") else text
    gens_s, _, gam = body.partition(";Gamma=")
    I = ideal_closure(FR.ring, parse_elements(FR.ring, gens_s) if gens_s.strip() else [])
    gam = gam.strip() or "max"
    G = gam if gam in ("min", "max") else parse_elements(FR.ring, gam)
    return make_form_ideal(FR, I, G)


def form_ideal_sum(P: FormIdeal, Q: FormIdeal) -> FormIdeal:
    R = P.form.ring
    I = ideal_closure(R, list(P.I.elements) + list(Q.I.elements))
    G = _span_of(R, list(np.flatnonzero(P.Gamma)) + list(np.flatnonzero(Q.Gamma)))
    return FormIdeal(P.form, I, G)


def form_ideal_sym_product(P: FormIdeal, Q: FormIdeal) -> FormIdeal:
    """(I, G) o (J, D) = (IJ + JI, G_min(IJ + JI) + ^J G + ^I D), validated."""
    if P.form is not Q.form:
        raise FormError("form ideals over different form rings")
    FR, R = P.form, P.form.ring
    IJ = ideal_product(P.I, Q.I)
    parts = list(np.flatnonzero(gamma_min(FR, IJ)))
    parts += _twist_span(FR, Q.I.elements, P.Gamma)
    parts += _twist_span(FR, P.I.elements, Q.Gamma)
    out = FormIdeal(FR, IJ, _span_of(R, parts))
    problems = validate_form_ideal(out)
    if problems:
        raise FormError("symmetrised product is not a form ideal: " + "; ".join(problems))
    return out


# ---------------------------------------------------------------------------
# matrices indexed by Omega


class UnitarySpace:
    """Degree-2n matrices over a form ring with the hyperbolic form."""

    def __init__(self, FR: FormRing, n: int):
        self.FR, self.n = FR, n
        self.R = FR.ring
        self.space = MatSpace(FR.ring, 2 * n)
        R = self.R
        H = np.full((2 * n, 2 * n), R.zero, dtype=np.int64)
        for i in range(1, n + 1):
            H[self.pos(i), self.pos(-i)] = R.one
            H[self.pos(-i), self.pos(i)] = FR.lam
        self.H = H

    @property
    def omega(self):
        return list(range(1, self.n + 1)) + list(range(-self.n, 0))

    def pos(self, i: int) -> int:
        if i == 0 or abs(i) > self.n:
            raise ValueError(f"index {i} not in Omega")
        return i - 1 if i > 0 else 2 * self.n + i

    def conj_transpose(self, G):
        return np.swapaxes(self.FR.inv[np.asarray(G, dtype=np.int64)], -1, -2)

    def column_defects(self, G):
        """f(g e_k, g e_k) for every column k: sum_{i>0} conj(g_ik) g_-i,k."""
        R, n = self.R, self.n
        G = np.asarray(G, dtype=np.int64)
        acc = np.full(G.shape[:-2] + (2 * n,), R.zero, dtype=np.int64)
        for i in range(1, n + 1):
            acc = R.add(acc, R.mul(self.FR.inv[G[..., self.pos(i), :]], G[..., self.pos(-i), :]))
        return acc

    def member(self, G, Gamma=None):
        """Batch test for GU(2n, A, Lambda); with Gamma also test the column defects lie in Gamma."""
        S = self.space
        G = np.asarray(G, dtype=np.int64)
        single = G.ndim == 2
        if single:
            G = G[None]
        keep = np.all(S.mul(S.mul(self.conj_transpose(G), self.H), G) == self.H, axis=(1, 2))
        mask = self.FR.Lambda if Gamma is None else Gamma
        keep &= mask[self.column_defects(G)].all(axis=1)
        return bool(keep[0]) if single else keep

    def transvection(self, i: int, j: int, xi: int, check: bool = True):
        """T_ij(xi): short root for i != -j, long root e + xi e_{i,-i} otherwise."""
        R, FR = self.R, self.FR
        if i == j:
            raise ValueError("i != j required")
        g = self.space.eye.copy()
        if i == -j:
            if check and not FR.long_root_mask(i)[xi]:
                raise FormError(f"long root parameter {R.fmt(xi)} is not admissible at ({i},{-i})")
            g[self.pos(i), self.pos(-i)] = xi
            return g
        ei, ej = (1 if i > 0 else -1), (1 if j > 0 else -1)
        c = FR.lam_pow((ej - ei) // 2)
        g[self.pos(i), self.pos(j)] = R.add(g[self.pos(i), self.pos(j)], xi)
        p, q = self.pos(-j), self.pos(-i)
        g[p, q] = R.sub(g[p, q], R.mul(c, FR.inv[xi]))
        return g

    def short_pairs(self):
        return [(i, j) for i in self.omega for j in self.omega if i != j and i != -j]

    def hyperbolic(self, a):
        """diag(a, P conj(a^-1)^T P): the image of GL(n, A) in GU(2n, A, Lambda)."""
        n = self.n
        Sn = MatSpace(self.R, n)
        ai = Sn.inv(np.asarray(a, dtype=np.int64))
        b = np.swapaxes(self.FR.inv[ai], -1, -2)[..., ::-1, ::-1]
        g = self.space.identity(None if np.ndim(a) == 2 else len(a))
        g[..., :n, :n] = a
        g[..., n:, n:] = b
        return g


# ---------------------------------------------------------------------------
# Steinberg relations


def check_steinberg_relations(US: UnitarySpace, max_params: int = 4096):
    """Exhaustive check of (R1)-(R6) over Omega index tuples and admissible parameters.

    (R6) is checked in the form
        [T_{i,-i}(a), T_{-i,j}(x)] = T_ij(a x) T_{-j,j}(-lambda^{(eps(i)+eps(j))/2} conj(x) a x),
    the exponent that makes the identity hold for every symmetry lambda
    (with lambda = 1 any exponent works).  Returns
    {relation: (checks, failures, witness)}.
    """
    FR, R, S = US.FR, US.R, US.space
    X = R.elements()
    omega = US.omega
    eps = lambda i: 1 if i > 0 else -1  # noqa: E731
    res = {k: [0, 0, None] for k in ("R1", "R2", "R3", "R4", "R5", "R6")}

    def T(i, j, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=np.int64))
        return np.stack([US.transvection(i, j, int(x), check=False) for x in xs]) if len(xs) else S.identity(0)

    def params(i, j):
        if i == -j:
            return np.flatnonzero(FR.long_root_mask(i))
        return X

    def record(name, ok, info):
        res[name][0] += ok.size
        if not ok.all():
            res[name][1] += int((~ok).sum())
            if res[name][2] is None:
                res[name][2] = info
    cache = {}

    def Tc(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = T(i, j, params(i, j))
        return cache[(i, j)], params(i, j)

    def comm_pairs(A, B):
        return commutator_batch(S, A, B)

    for i, j in itertools.product(omega, omega):
        if i == j:
            continue
        Mi, P = Tc(i, j)
        if i != -j:
            c = FR.lam_pow((eps(j) - eps(i)) // 2)
            other = T(-j, -i, R.neg(R.mul(c, FR.inv[P])))
            record("R1", np.all(Mi == other, axis=(1, 2)), (i, j))
        a, b = (t.ravel() for t in np.meshgrid(np.arange(len(P)), np.arange(len(P)), indexing="ij"))
        lhs = S.mul(Mi[a], Mi[b])
        rhs = T(i, j, R.add(P[a], P[b]))
        record("R2", np.all(lhs == rhs, axis=(1, 2)), (i, j))
    for i, j, h, k in itertools.product(omega, repeat=4):
        if i == j or h == k:
            continue
        A, PA = Tc(i, j)
        B, PB = Tc(h, k)
        if h not in (j, -i) and k not in (i, -j):
            record("R3", S.is_identity(comm_pairs(A, B)), (i, j, h, k))
    for i, j, h in itertools.product(omega, repeat=3):
        if i in (j, -j) or h in (j, -j) or i in (h, -h):
            continue
        A, PA = Tc(i, j)
        B, PB = Tc(j, h)
        C = comm_pairs(A, B)
        a, b = (t.ravel() for t in np.meshgrid(PA, PB, indexing="ij"))
        record("R4", np.all(C == T(i, h, R.mul(a, b)), axis=(1, 2)), (i, j, h))
    for i, j in itertools.product(omega, omega):
        if i in (j, -j):
            continue
        A, PA = Tc(i, j)
        B, PB = Tc(j, -i)
        C = comm_pairs(A, B)
        a, b = (t.ravel() for t in np.meshgrid(PA, PB, indexing="ij"))
        lam_e = FR.lam_pow(-eps(i))
        par = R.sub(R.mul(a, b), R.mul(lam_e, R.mul(FR.inv[b], FR.inv[a])))
        record("R5", np.all(C == T(i, -i, par), axis=(1, 2)), (i, j))
        # (R6)
        L, PL = Tc(i, -i)
        B, PB = Tc(-i, j)
        C = comm_pairs(L, B)
        a, x = (t.ravel() for t in np.meshgrid(PL, PB, indexing="ij"))
        c = FR.lam_pow((eps(i) + eps(j)) // 2)
        longp = R.neg(R.mul(c, R.mul(R.mul(FR.inv[x], a), x)))
        rhs = S.mul(T(i, j, R.mul(a, x)), T(-j, j, longp))
        record("R6", np.all(C == rhs, axis=(1, 2)), (i, j))
    return {k: tuple(v) for k, v in res.items()}


# ---------------------------------------------------------------------------
# subgroups


def whole_form_ideal(FR: FormRing) -> FormIdeal:
    return FormIdeal(FR, whole_ideal(FR.ring), FR.Lambda.copy())


def zero_form_ideal(FR: FormRing) -> FormIdeal:
    R = FR.ring
    z = np.zeros(R.size, dtype=bool)
    z[R.zero] = True
    return FormIdeal(FR, zero_ideal(R), z)


def _stack(space, mats):
    return np.stack(mats) if mats else space.identity(0)


def fu_generators(US: UnitarySpace, P: FormIdeal):
    """T_ij(x), x in additive generators of I, and long roots with parameters in the twisted Gamma."""
    R, FR = US.R, US.FR
    mats = []
    gi = P.I.additive_generators()
    for i, j in US.short_pairs():
        mats += [US.transvection(i, j, g) for g in gi]
    for i in US.omega:
        for g in additive_generators(R, FR.long_root_mask(i, P.Gamma)):
            mats.append(US.transvection(i, -i, g))
    return _stack(US.space, mats)


def eu_alphabet(US: UnitarySpace):
    """Generators of EU(2n, A, Lambda)."""
    return fu_generators(US, whole_form_ideal(US.FR))


def eu_z_generators(US: UnitarySpace, P: FormIdeal):
    """^{T_ji(x)} T_ij(a): level letters conjugated by every opposite root element."""
    R, FR, S = US.R, US.FR, US.space
    out = []
    for i, j in US.short_pairs():
        X = R.elements()
        C = np.stack([US.transvection(j, i, int(x)) for x in X])
        Ci = np.stack([US.transvection(j, i, int(R.neg(x))) for x in X])
        for g in P.I.additive_generators():
            out.append(S.mul(S.mul(C, US.transvection(i, j, g)), Ci))
    for i in US.omega:
        gam = additive_generators(R, FR.long_root_mask(i, P.Gamma))
        if not gam:
            continue
        X = np.flatnonzero(FR.long_root_mask(-i))
        C = np.stack([US.transvection(-i, i, int(x)) for x in X])
        Ci = np.stack([US.transvection(-i, i, int(R.neg(x))) for x in X])
        for g in gam:
            out.append(S.mul(S.mul(C, US.transvection(i, -i, g)), Ci))
    return np.concatenate(out) if out else S.identity(0)


def gu_predicate(US: UnitarySpace, P: FormIdeal, gamma_condition: bool = False):
    """Membership in GU(2n, I, Gamma): unitary, congruent to e mod I.

    By default Gamma is taken as Gamma_max(I), so the test is
    GU(2n, A, Lambda) intersected with GL(2n, A, I).  With gamma_condition
    the column values f(g e_k, g e_k) must also lie in Gamma.
    """
    S = US.space

    def member(G):
        G = np.asarray(G, dtype=np.int64)
        if G.ndim == 2:
            G = G[None]
        ok = congruence_mask(S, G, P.I)
        ok &= US.member(G, P.Gamma if gamma_condition else None)
        return ok

    return member


def gu_sampler(US: UnitarySpace, P: FormIdeal, factors: int = 6):
    """Random elements of GU(2n, I, Gamma): products of relative elementary
    generators and hyperbolic images of GL(n, A, I)."""
    from .matrices import random_congruence_batch

    S = US.space
    Z = eu_z_generators(US, P)
    Sn = MatSpace(US.R, US.n)

    def sample(rng, k):
        g = S.identity(k)
        for _ in range(factors):
            if len(Z):
                g = S.mul(g, Z[rng.integers(0, len(Z), k)])
            a = random_congruence_batch(Sn, P.I, rng, k)
            g = S.mul(g, US.hyperbolic(a))
        return g

    return sample


def unitary_subgroup(US: UnitarySpace, P: FormIdeal, kind: str, cap: int = ENUM_CAP,
                     gamma_condition: bool = False) -> SubgroupHandle:
    """FU, EU or GU of level P.

    FU is generated by the level transvections, EU is their normal closure
    under EU(2n, A, Lambda), GU is predicate-backed and materialised by
    filtering GL(2n, A, I) when that fits the cap.
    """
    S = US.space
    name = f"{kind}({2 * US.n},{P.fmt()})"
    if kind == "FU":
        gens = fu_generators(US, P)
        G = closure(S, gens, cap, name)
        return SubgroupHandle(name, S, gens=gens, group=G, construction="level transvections")
    if kind == "EU":
        gens = fu_generators(US, P)
        G = normal_closure(S, gens, eu_alphabet(US), cap, name)
        return SubgroupHandle(name, S, gens=eu_z_generators(US, P), group=G, normal_in_E=True,
                              construction="normal closure under EU(A)")
    if kind == "GU":
        member = gu_predicate(US, P, gamma_condition)
        h = SubgroupHandle(name, S, member=member, sampler=gu_sampler(US, P), construction="predicate")
        bound = P.I.size ** (S.n * S.n)
        if bound <= cap:
            E = gl_congruence_enumerate(S, P.I, cap)
            E = E.elements if isinstance(E, MatrixGroup) else E
            keep = np.concatenate([member(E[s : s + 65536]) for s in range(0, len(E), 65536)]) if len(E) else np.zeros(0, bool)
            G = MatrixGroup(S, name)
            rest = E[keep]
            rest = rest[~S.is_identity(rest)]
            if len(rest):
                G._add_block(rest, cap)
            h.group = G
            h.construction = "filtered enumeration"
        return h
    raise ValueError(f"unknown unitary subgroup kind {kind!r}")


@dataclass
class ChainReport:
    product: FormIdeal
    sizes: dict
    links: list  # (name, ok, mode, detail)

    @property
    def ok(self):
        return all(ok for _, ok, _, _ in self.links)


def verify_unitary_chain(US: UnitarySpace, P: FormIdeal, Q: FormIdeal, samples: int = 2000,
                         seed: int = 0, cap: int = ENUM_CAP) -> ChainReport:
    """Check EU(PoQ) <= [FU(P),FU(Q)] <= [EU(P),EU(Q)] <= [GU(P),GU(Q)] <= GU(PoQ)."""
    if US.n < 3:
        raise ValueError("the unitary chain needs n >= 3")
    S = US.space
    PQ = form_ideal_sym_product(P, Q)
    alph = eu_alphabet(US)
    eu_pq = unitary_subgroup(US, PQ, "EU", cap).group
    fuP, fuQ = fu_generators(US, P), fu_generators(US, Q)
    c_fu = commutator_subgroup(S, fuP, fuQ, cap=cap, name="[FU,FU]")
    zP, zQ = eu_z_generators(US, P), eu_z_generators(US, Q)
    c_eu = commutator_subgroup(S, zP, zQ, conj_alphabet=alph, cap=cap, name="[EU,EU]")
    outer = gu_predicate(US, PQ)
    links = []
    sizes = {"EU(PoQ)": eu_pq.size, "[FU,FU]": c_fu.size, "[EU,EU]": c_eu.size}
    links.append(("EU(PoQ) <= [FU,FU]", bool(c_fu.contains_batch(eu_pq.generators()).all()), "exhaustive", ""))
    links.append(("[FU,FU] <= [EU,EU]", bool(c_eu.contains_batch(c_fu.generators()).all()), "exhaustive", ""))
    gP, gQ = gu_predicate(US, P), gu_predicate(US, Q)
    inc = bool(gP(zP).all() and gQ(zQ).all())
    links.append(("[EU,EU] <= [GU,GU]", inc, "exhaustive", "EU generators satisfy the GU predicates"))
    guP = unitary_subgroup(US, P, "GU", cap)
    guQ = unitary_subgroup(US, Q, "GU", cap)
    if guP.group is not None and guQ.group is not None:
        c_gu = commutator_subgroup(S, guP.group.elements, guQ.group.elements, cap=cap, name="[GU,GU]") \
            if guP.group.size * guQ.group.size <= 1_000_000 else \
            commutator_subgroup(S, _group_gens(guP.group), _group_gens(guQ.group), cap=cap, name="[GU,GU]")
        sizes["[GU,GU]"] = c_gu.size
        ok = bool(outer(c_gu.elements).all())
        links.append(("[GU,GU] <= GU(PoQ)", ok, "exhaustive", ""))
        links[2] = ("[EU,EU] <= [GU,GU]", bool(c_gu.contains_batch(c_eu.elements).all()), "exhaustive", "")
    else:
        sP, sQ = guP.sampler, guQ.sampler

        def comm_sampler(rng, k):
            x, y = sP(rng, k), sQ(rng, k)
            return S.mul(S.mul(x, y), S.mul(S.inv(x), S.inv(y)))

        rep = randomized_containment(comm_sampler, outer, samples, seed)
        links.append(("[GU,GU] <= GU(PoQ)", rep.ok, "randomized", f"{rep.samples} samples"))
        probe = randomized_containment(comm_sampler, c_eu, min(samples, 1000), seed + 1)
        sizes["[GU,GU] probe in [EU,EU]"] = f"{probe.samples - probe.failures}/{probe.samples}"
    return ChainReport(PQ, sizes, links)


def _group_gens(G: MatrixGroup):
    return G.generators()
