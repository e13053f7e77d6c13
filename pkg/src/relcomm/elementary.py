"""Elementary matrices, words in them, and three constructive factorisations.

Letters use 1-based indices, matching the usual e_ij notation:

* ``Elem(i, j, x)``      e_ij(x)
* ``ZLet(i, j, a, t)``   z_ij(a, t) = e_ji(a) e_ij(t) e_ji(-a)
* ``ConjBlock(sigma, inner)``  sigma * inner * sigma^{-1}

Conventions: [x, y] = x y x^-1 y^-1 and the left conjugate ^x y = x y x^-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

import numpy as np

from .groups import MatrixGroup, SubgroupHandle, closure, normal_closure
from .matrices import ENUM_CAP, MatSpace, congruence_factor, congruence_member
from .rings import Ideal, additive_generators, whole_ideal


@dataclass(frozen=True)
class Elem:
    i: int
    j: int
    x: int
    inv: bool = False

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("elementary letter needs i != j")


@dataclass(frozen=True)
class ZLet:
    i: int
    j: int
    a: int
    alpha: int
    inv: bool = False

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("z letter needs i != j")


@dataclass(frozen=True)
class ConjBlock:
    sigma: tuple  # Elem letters
    inner: tuple
    sigma_id: str = "s"
    inv: bool = False


Letter = Union[Elem, ZLet, ConjBlock]


class ElemWord:
    """A word of letters over a fixed matrix space."""

    def __init__(self, space: MatSpace, letters=()):
        self.space = space
        self.letters = tuple(letters)
        for L in self.letters:
            for idx in _indices(L):
                if not 1 <= idx <= space.n:
                    raise ValueError(f"letter index {idx} outside 1..{space.n}")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other):
        return ElemWord(self.space, self.letters + tuple(other.letters))

    def inverse(self):
        return ElemWord(self.space, tuple(invert_letter(L) for L in reversed(self.letters)))

    def eval(self):
        return eval_word(self)

    def __repr__(self):
        return f"ElemWord({len(self.letters)} letters over {self.space})"


def _indices(L):
    if isinstance(L, ConjBlock):
        return [k for sub in L.sigma + L.inner for k in _indices(sub)]
    return [L.i, L.j]


def invert_letter(L):
    return type(L)(**{**L.__dict__, "inv": not L.inv})


def letter_matrix(space: MatSpace, L):
    R = space.R
    if isinstance(L, Elem):
        x = R.neg(L.x) if L.inv else L.x
        return space.elementary(L.i - 1, L.j - 1, x)
    if isinstance(L, ZLet):
        t = R.neg(L.alpha) if L.inv else L.alpha
        i, j = L.i - 1, L.j - 1
        return space.mul(
            space.mul(space.elementary(j, i, L.a), space.elementary(i, j, t)),
            space.elementary(j, i, R.neg(L.a)),
        )
    if isinstance(L, ConjBlock):
        s = _eval_letters(space, L.sigma)
        w = _eval_letters(space, L.inner)
        if L.inv:
            w = space.inv(w)
        return space.mul(space.mul(s, w), space.inv(s))
    raise TypeError(f"unknown letter {L!r}")


def _eval_letters(space, letters):
    out = space.eye.copy()
    for L in letters:
        out = space.mul(out, letter_matrix(space, L))
    return out


def eval_word(w: ElemWord):
    """Left-to-right product of the letter matrices."""
    return _eval_letters(w.space, w.letters)


def word_parameters_in(w: ElemWord, I: Ideal) -> bool:
    """Every Elem/ZLet level parameter, and every ConjBlock inner parameter, lies in I."""

    def ok(L):
        if isinstance(L, Elem):
            return L.x in I
        if isinstance(L, ZLet):
            return L.alpha in I
        return all(ok(s) for s in L.inner)

    return all(ok(L) for L in w.letters)


def format_word(w: ElemWord) -> str:
    """One letter per line: ``E i j x``, ``Z i j a alpha``, ``C id [ ... ]``."""
    R = w.space.R
    lines, sigmas = [], {}

    def one(L):
        if isinstance(L, Elem):
            x = R.neg(L.x) if L.inv else L.x
            return f"E {L.i} {L.j} {R.fmt(x)}"
        if isinstance(L, ZLet):
            t = R.neg(L.alpha) if L.inv else L.alpha
            return f"Z {L.i} {L.j} {R.fmt(L.a)} {R.fmt(t)}"
        inner = [one(s) for s in L.inner]
        if L.inv:
            inner = [one(invert_letter(s)) for s in reversed(L.inner)]
        sigmas.setdefault(L.sigma_id, " ; ".join(one(s) for s in L.sigma))
        return f"C {L.sigma_id} [ " + " ; ".join(inner) + " ]"

    body = [one(L) for L in w.letters]
    for sid, text in sigmas.items():
        lines.append(f"# {sid} = [ {text} ]")
    return "\n".join(lines + body)


def parse_word(space: MatSpace, text: str) -> ElemWord:
    """Inverse of format_word for E and Z letters (comments are skipped)."""
    R = space.R
    letters = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "E" and len(parts) == 4:
            letters.append(Elem(int(parts[1]), int(parts[2]), R.parse(parts[3])))
        elif parts[0] == "Z" and len(parts) == 5:
            letters.append(ZLet(int(parts[1]), int(parts[2]), R.parse(parts[3]), R.parse(parts[4])))
        else:
            raise ValueError(f"cannot parse letter {line!r}")
    return ElemWord(space, letters)


# ---------------------------------------------------------------------------
# relations (E1)-(E3)


@dataclass
class RelationReport:
    checks: dict
    failures: dict
    witnesses: list

    @property
    def ok(self):
        return not any(self.failures.values())


def check_elem_relations(space: MatSpace, max_carrier: int = 64) -> RelationReport:
    """Exhaustive check of additivity, commuting positions and the commutator rule."""
    R, n = space.R, space.n
    if R.size > max_carrier:
        raise ValueError("exhaustive relation check limited to small carriers")
    X = R.elements()
    a, b = (t.ravel() for t in np.meshgrid(X, X, indexing="ij"))
    checks = {"E1": 0, "E2": 0, "E3": 0}
    fails = {"E1": 0, "E2": 0, "E3": 0}
    wit = []
    pairs = list(itertools.permutations(range(n), 2))

    def batch_e(i, j, xs):
        return space.elementary_batch(i, j, xs)

    def record(name, bad, info):
        checks[name] += len(bad)
        if bad.any():
            fails[name] += int(bad.sum())
            if len(wit) < 5:
                k = int(np.argmax(bad))
                wit.append((name, info, int(a[k]), int(b[k])))

    for i, j in pairs:
        lhs = space.mul(batch_e(i, j, a), batch_e(i, j, b))
        record("E1", ~np.all(lhs == batch_e(i, j, R.add(a, b)), axis=(1, 2)), (i + 1, j + 1))
    for (i, j), (k, l) in itertools.product(pairs, pairs):
        x, y = batch_e(i, j, a), batch_e(k, l, b)
        c = space.mul(space.mul(x, y), space.mul(batch_e(i, j, R.neg(a)), batch_e(k, l, R.neg(b))))
        if i != l and j != k:
            record("E2", ~space.is_identity(c), (i + 1, j + 1, k + 1, l + 1))
        elif j == k and i != l:
            record("E3", ~np.all(c == batch_e(i, l, R.mul(a, b)), axis=(1, 2)), (i + 1, j + 1, l + 1))
    return RelationReport(checks, fails, wit)


# ---------------------------------------------------------------------------
# unitriangular factorisation


def factor_unitriangular(space: MatSpace, U, I: Ideal, upper: bool = True) -> ElemWord:
    """Word of at most n(n-1)/2 level-I letters evaluating to U.

    Sweeps the diagonals j - i = 1, 2, ... in turn, clearing each entry by
    right multiplication with an elementary matrix; entries on a diagonal
    never disturb the ones on the same or lower diagonals.
    """
    R, n = space.R, space.n
    U = np.asarray(U, dtype=np.int64)
    mask = np.triu(np.ones((n, n), bool), 1) if upper else np.tril(np.ones((n, n), bool), -1)
    if not np.all(np.diag(U) == R.one) or np.any(U[~mask & ~np.eye(n, dtype=bool)] != R.zero):
        raise ValueError("matrix is not unitriangular of the requested shape")
    if not np.all(I.mask[U[mask]]):
        raise ValueError("off-diagonal entries outside the ideal")
    x = U.copy()
    used = []
    for d in range(1, n):
        for i in range(n - d):
            r, c = (i, i + d) if upper else (i + d, i)
            t = int(x[r, c])
            if t != R.zero:
                x = space.mul(x, space.elementary(r, c, R.neg(t)))
                used.append(Elem(r + 1, c + 1, t))
    assert space.is_identity(x)
    return ElemWord(space, reversed(used))


# ---------------------------------------------------------------------------
# Whitehead factorisation


def _block(space2, n, tl=None, tr=None, bl=None, br=None):
    R = space2.R
    g = space2.eye.copy()
    for blk, (r, c) in ((tl, (0, 0)), (tr, (0, n)), (bl, (n, 0)), (br, (n, n))):
        if blk is not None:
            g[r : r + n, c : c + n] = blk
    return g


def _diag_word(space, space2, u, I, A, tag):
    """Word for diag(u^{-1}, u) with u in GL(n, A, I)."""
    R, n = space.R, space.n
    ui = space.inv(u)
    q = space.sub(u, space.eye)
    t1 = _block(space2, n, tr=q)
    t2 = _block(space2, n, tr=space.neg(space.mul(u, q)))
    t3 = _block(space2, n, bl=space.neg(space.mul(space.mul(ui, q), ui)))
    sigma_inv = _block(space2, n, bl=space.neg(ui))
    w1 = factor_unitriangular(space2, t1, I, upper=True)
    w2 = factor_unitriangular(space2, t2, I, upper=True)
    w3 = factor_unitriangular(space2, t3, I, upper=False)
    ws = factor_unitriangular(space2, sigma_inv, A, upper=False)
    block = ConjBlock(ws.letters, w2.letters, tag)
    return ElemWord(space2, w1.letters + (block,) + w3.letters)


def whitehead_factor(space: MatSpace, x, y, I: Ideal) -> ElemWord:
    """Word in degree 2n evaluating to diag([x, y], 1) for x, y in GL(n, A, I).

    W(u) is a word for diag(u^{-1}, u): an upper level-I block, the conjugate
    of another upper level-I block by the lower block matrix with -u^{-1},
    and a lower level-I block.  Then

        W(x^{-1}) W(y^{-1}) W(x^{-1} y^{-1})^{-1} = diag([x, y], 1).

    Every letter is a level-I elementary letter or a conjugate of a word in
    such letters, so the result is certified to lie in E(2n, A, I).
    Length: at most 9 n^2 level letters plus three conjugators of n^2 letters.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if not (congruence_member(space, x, I) and congruence_member(space, y, I)):
        raise ValueError("x and y must lie in GL(n, A, I)")
    if not (space.is_invertible(x) and space.is_invertible(y)):
        raise ValueError("x and y must be invertible")
    space2 = MatSpace(space.R, 2 * space.n)
    A = whole_ideal(space.R)
    xi, yi = space.inv(x), space.inv(y)
    w_a = _diag_word(space, space2, xi, I, A, "s1")
    w_b = _diag_word(space, space2, yi, I, A, "s2")
    w_c = _diag_word(space, space2, space.mul(xi, yi), I, A, "s3")
    return w_a + w_b + w_c.inverse()


def _shift_letter(L, k, tag):
    # letters of a degree-2 word moved to positions (k, k + 1)
    if isinstance(L, Elem):
        return Elem(L.i + k - 1, L.j + k - 1, L.x, L.inv)
    return ConjBlock(tuple(_shift_letter(s, k, tag) for s in L.sigma),
                     tuple(_shift_letter(s, k, tag) for s in L.inner), tag, L.inv)


def certify_relative_elementary(space: MatSpace, g, I: Ideal):
    """A word with value g whose letters certify g in E(n, A, I), or None.

    Commutative A only.  Elimination writes g as level-I elementary
    factors around a diagonal matrix D of determinant 1 (per local factor
    of A).  D is the product of diag(p_k, p_k^{-1}) in positions (k, k+1)
    with p_k the partial products of its entries; each of these comes from
    the degree-2 Whitehead word.  None means g is not congruent to e or
    has determinant other than 1, so g lies outside E(n, A, I).
    """
    R, n = space.R, space.n
    g = np.asarray(g, dtype=np.int64)
    if not congruence_member(space, g, I) or int(space.det(g)) != R.one:
        return None
    space1, space2 = MatSpace(R, 1), MatSpace(R, 2)
    A = whole_ideal(R)
    letters, diag = [], []
    count = itertools.count(1)

    def flush():
        if not diag:
            return
        D = space.prod(diag)
        p = R.one
        for k in range(n - 1):
            p = int(R.mul(p, D[k, k]))
            if p != R.one:
                tag = f"d{next(count)}"
                w = _diag_word(space1, space2, np.array([[R.inv(p)]], dtype=np.int64), I, A, tag)
                letters.extend(_shift_letter(L, k + 1, tag) for L in w.letters)
        diag.clear()

    for f in congruence_factor(space, g, I):
        off = np.argwhere((f != space.eye) & ~np.eye(n, dtype=bool))
        if len(off) == 0:
            diag.append(f)
        else:
            flush()
            r, c = off[0]
            letters.append(Elem(int(r) + 1, int(c) + 1, int(f[r, c])))
    flush()
    return ElemWord(space, letters)


# ---------------------------------------------------------------------------
# rewriting conjugates of level generators into z-letters


def _conj_single(R, k, l, a, i, j, alpha):
    """^{e_kl(a)} e_ij(alpha) as level letters, for (k, l) != (j, i)."""
    if (k, l) == (i, j):
        return [(i, j, alpha)]
    if l == i and k != j:
        return [(k, j, int(R.mul(a, alpha))), (i, j, alpha)]
    if k == j and l != i:
        return [(i, l, int(R.neg(R.mul(alpha, a)))), (i, j, alpha)]
    return [(i, j, alpha)]


def conjugation_identity(R, i, j, k, a, b, alpha):
    """Factors of ^{e_ij(a) e_ji(b)} e_ij(alpha), k a third index.

    Plain factors are (p, q, beta); conjugated ones are
    ('z', (s, t, gamma), (p, q, beta)) meaning ^{e_st(gamma)} e_pq(beta).
    """
    m, ad, ng = R.mul, R.add, R.neg
    one = R.one
    ba = int(m(b, a))
    ab = int(m(a, b))
    return [
        (k, j, int(ng(m(alpha, ad(one, ba))))),
        (k, i, int(m(alpha, b))),
        (i, k, int(ng(m(m(m(a, b), alpha), b)))),
        (i, j, int(m(ab, alpha))),
        ("z", (j, k, int(b)), (k, j, int(alpha))),
        (i, j, int(alpha)),
        (i, k, int(m(m(R.sub(ab, one), alpha), b))),
        (j, k, int(m(m(b, alpha), b))),
        ("z", (i, j, int(a)), (j, i, int(ng(m(m(b, alpha), b))))),
        ("z", (k, i, int(one)), (i, k, int(m(alpha, b)))),
        (k, j, int(m(m(alpha, b), a))),
        (i, j, int(m(m(alpha, b), a))),
    ]


def _identity_factor_matrix(space, f):
    if f[0] == "z":
        _, (s, t, g), (p, q, beta) = f
        c = space.elementary(s - 1, t - 1, g)
        return space.mul(space.mul(c, space.elementary(p - 1, q - 1, beta)), space.elementary(s - 1, t - 1, space.R.neg(g)))
    p, q, beta = f
    return space.elementary(p - 1, q - 1, beta)


def check_conjugation_identity(space: MatSpace, I: Ideal, triples=None):
    """Evaluate both sides of ``conjugation_identity`` for all a, b in R, alpha in I.

    triples: (i, j, k) index triples (1-based); default all of them.
    Returns (cases, failures, first failing case or None).
    """
    R, n = space.R, space.n
    if n < 3:
        raise ValueError("the identity needs a third index")
    if triples is None:
        triples = list(itertools.permutations(range(1, n + 1), 3))
    cases = fails = 0
    witness = None
    for i, j, k in triples:
        for a in R.elements():
            for b in R.elements():
                c = space.mul(space.elementary(i - 1, j - 1, a), space.elementary(j - 1, i - 1, b))
                ci = space.inv(c)
                for alpha in I.elements:
                    lhs = space.mul(space.mul(c, space.elementary(i - 1, j - 1, alpha)), ci)
                    facs = conjugation_identity(R, i, j, k, int(a), int(b), int(alpha))
                    rhs = space.prod(_identity_factor_matrix(space, f) for f in facs)
                    cases += 1
                    if not np.array_equal(lhs, rhs):
                        fails += 1
                        witness = witness or (i, j, k, int(a), int(b), int(alpha))
    return cases, fails, witness


def rewrite_conjugated_generator(c: ElemWord, i: int, j: int, alpha: int) -> ElemWord:
    """Rewrite ^c e_ij(alpha) as a word in z-letters z_pq(a, beta), beta in I.

    Recursion on the length of the conjugator c (its last letter is the
    innermost one).  The cases follow the proof that the z-letters generate
    the relative elementary group; each call strictly shortens c.
    """
    space = c.space
    R, n = space.R, space.n
    if n < 3:
        raise ValueError("rewriting needs n >= 3 (a third index)")
    if i == j:
        raise ValueError("i != j required")
    conj = []
    for L in c.letters:
        if not isinstance(L, Elem):
            raise TypeError("conjugator must consist of Elem letters")
        conj.append((L.i, L.j, int(R.neg(L.x)) if L.inv else L.x))
    out: list = []
    _rewrite(R, n, tuple(conj), i, j, int(alpha), out)
    return ElemWord(space, out)


def _third(n, i, j):
    return next(k for k in range(1, n + 1) if k not in (i, j))


def _rewrite(R, n, c, i, j, alpha, out):
    zero = R.zero
    if alpha == zero:
        return
    if not c:
        out.append(ZLet(i, j, zero, alpha))
        return
    k, l, a = c[-1]
    rest = c[:-1]
    if a == zero:
        _rewrite(R, n, rest, i, j, alpha, out)
        return
    if (k, l) != (j, i):
        for p, q, beta in _conj_single(R, k, l, a, i, j, alpha):
            _rewrite(R, n, rest, p, q, beta, out)
        return
    if not rest:
        out.append(ZLet(i, j, a, alpha))
        return
    m, nn, b = rest[-1]
    rest2 = rest[:-1]
    if b == zero:
        _rewrite(R, n, rest2 + (c[-1],), i, j, alpha, out)
    elif (m, nn) == (j, i):
        _rewrite(R, n, rest2 + ((j, i, int(R.add(b, a))),), i, j, alpha, out)
    elif (m, nn) == (i, j):
        kk = _third(n, i, j)
        for f in conjugation_identity(R, i, j, kk, b, a, alpha):
            if f[0] == "z":
                _, letter, (p, q, beta) = f
                _rewrite(R, n, rest2 + (letter,), p, q, beta, out)
            else:
                p, q, beta = f
                _rewrite(R, n, rest2, p, q, beta, out)
    elif m != i and nn != j:
        # the two letters commute
        _rewrite(R, n, rest2 + ((j, i, a), (m, nn, b)), i, j, alpha, out)
    elif m != i and nn == j:
        # e_mj(b) e_ji(a) = e_ji(a) e_mi(ba) e_mj(b), and e_mj(b) fixes e_ij(alpha)
        inner = rest2 + ((j, i, a),)
        _rewrite(R, n, inner, m, j, int(R.mul(R.mul(b, a), alpha)), out)
        _rewrite(R, n, inner, i, j, alpha, out)
    else:
        # m == i, nn != j: e_in(b) e_ji(a) = e_ji(a) e_jn(-ab) e_in(b)
        inner = rest2 + ((j, i, a),)
        _rewrite(R, n, inner, i, nn, int(R.mul(R.mul(alpha, a), b)), out)
        _rewrite(R, n, inner, i, j, alpha, out)


# ---------------------------------------------------------------------------
# generating sets and subgroups


def elementary_alphabet(space: MatSpace):
    """e_ij(b) for b in an additive generating set of R; generates E(n, R)."""
    R = space.R
    gens = additive_generators(R, np.ones(R.size, dtype=bool))
    mats = [space.elementary(i, j, b) for i, j in itertools.permutations(range(space.n), 2) for b in gens]
    return np.stack(mats) if mats else space.identity(1)


def level_letters(space: MatSpace, I: Ideal):
    """e_ij(alpha) for alpha in an additive generating set of I; generates E(n, I)."""
    gens = I.additive_generators()
    mats = [space.elementary(i, j, g) for i, j in itertools.permutations(range(space.n), 2) for g in gens]
    return np.stack(mats) if mats else space.identity(1)


def z_generators(space: MatSpace, I: Ideal):
    """z_ij(a, alpha) for all a in R and alpha in an additive generating set of I."""
    R = space.R
    gens = I.additive_generators()
    if not gens:
        return space.identity(1)
    A = R.elements()
    out = []
    for i, j in itertools.permutations(range(space.n), 2):
        left = space.elementary_batch(j, i, A)
        right = space.elementary_batch(j, i, R.neg(A))
        for g in gens:
            out.append(space.mul(space.mul(left, space.elementary(i, j, g)), right))
    return np.concatenate(out)


def comgenerator_families(space: MatSpace, I: Ideal, J: Ideal):
    """The four families generating [E(n,A,I), E(n,A,J)] as an E(n,A)-normal subgroup.

    [e_ji(alpha), ^{e_ij(a)} e_ji(beta)], [e_ji(alpha), e_ij(beta)],
    ^{e_ji(a)} e_ij(alpha beta) and ^{e_ji(a)} e_ij(beta alpha), over all
    i != j, alpha in I, beta in J, a in A.
    """
    R = space.R
    Ie, Je, A = I.elements, J.elements, R.elements()
    fam = []
    for i, j in itertools.permutations(range(space.n), 2):
        al, be, aa = (t.ravel() for t in np.meshgrid(Ie, Je, A, indexing="ij"))
        x = space.elementary_batch(j, i, al)
        xi = space.elementary_batch(j, i, R.neg(al))
        inner = space.elementary_batch(j, i, be)
        inner_i = space.elementary_batch(j, i, R.neg(be))
        cj = space.elementary_batch(i, j, aa)
        cji = space.elementary_batch(i, j, R.neg(aa))
        y = space.mul(space.mul(cj, inner), cji)
        yi = space.mul(space.mul(cj, inner_i), cji)
        fam.append(space.mul(space.mul(x, y), space.mul(xi, yi)))
        al2, be2 = (t.ravel() for t in np.meshgrid(Ie, Je, indexing="ij"))
        x = space.elementary_batch(j, i, al2)
        y = space.elementary_batch(i, j, be2)
        fam.append(space.mul(space.mul(x, y), space.mul(space.elementary_batch(j, i, R.neg(al2)),
                                                        space.elementary_batch(i, j, R.neg(be2)))))
        for prod in (R.mul(al2, be2), R.mul(be2, al2)):
            vals = np.unique(prod)
            a3, v3 = (t.ravel() for t in np.meshgrid(A, vals, indexing="ij"))
            fam.append(space.mul(space.mul(space.elementary_batch(j, i, a3), space.elementary_batch(i, j, v3)),
                                 space.elementary_batch(j, i, R.neg(a3))))
    return np.concatenate(fam)


def elementary_subgroup(space: MatSpace, I: Ideal, relative: bool = True, cap: int = ENUM_CAP) -> SubgroupHandle:
    """E(n, I) (relative=False) or E(n, R, I) (relative=True), materialised.

    For n >= 3 the relative group is the closure of the z-letters; for
    n = 2 it is built as the normal closure of E(2, I) under E(2, R).
    """
    name = f"E({space.n},{space.R.descriptor},{I.fmt()})" if relative else f"E({space.n},{I.fmt()})"
    if not relative:
        G = closure(space, level_letters(space, I), cap, name)
        return SubgroupHandle(name, space, gens=np.stack(G.gens) if G.gens else space.identity(1),
                              group=G, construction="level letters")
    if space.n >= 3:
        G = closure(space, z_generators(space, I), cap, name)
        construction = "z-letters"
    else:
        G = normal_closure(space, level_letters(space, I), elementary_alphabet(space), cap, name)
        construction = "normal closure"
    return SubgroupHandle(name, space, gens=z_generators(space, I) if space.n >= 3 else np.stack(G.gens) if G.gens else space.identity(1),
                          group=G, normal_in_E=True, construction=construction)


def random_elementary_word(space: MatSpace, I: Ideal, length: int, rng, relative: bool = True):
    """Random product of generators of E(n,R,I) (z-letters) or E(n,I), with its inverse."""
    R = space.R
    n = space.n
    g = space.eye.copy()
    gi = space.eye.copy()
    Iel = I.elements
    for _ in range(length):
        i, j = rng.choice(n, 2, replace=False)
        alpha = int(Iel[rng.integers(len(Iel))])
        a = int(rng.integers(R.size)) if relative else R.zero
        z = space.mul(space.mul(space.elementary(j, i, a), space.elementary(i, j, alpha)), space.elementary(j, i, R.neg(a)))
        zi = space.mul(space.mul(space.elementary(j, i, a), space.elementary(i, j, R.neg(alpha))), space.elementary(j, i, R.neg(a)))
        g = space.mul(g, z)
        gi = space.mul(zi, gi)
    return g, gi
