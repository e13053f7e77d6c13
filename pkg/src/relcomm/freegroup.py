"""Words in a free group and the standard commutator identities.

A word is a tuple of (symbol, exponent) pairs with exponent +1 or -1.
Conventions: [x, y] = x y x^-1 y^-1 and ^x y = x y x^-1.
"""

from __future__ import annotations

from functools import reduce as _fold


class FreeWord:
    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = _reduce(tuple(letters))

    @classmethod
    def gen(cls, name):
        return cls(((name, 1),))

    @property
    def reduced(self) -> bool:
        return True  # words are reduced on construction

    def __mul__(self, other):
        return FreeWord(self.letters + other.letters)

    def inv(self):
        return FreeWord(tuple((s, -e) for s, e in reversed(self.letters)))

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        if not self.letters:
            return "1"
        return " ".join(s if e == 1 else f"{s}^-1" for s, e in self.letters)


def _reduce(letters):
    out = []
    for s, e in letters:
        if e not in (1, -1):
            raise ValueError("exponents must be +1 or -1")
        if out and out[-1][0] == s and out[-1][1] == -e:
            out.pop()
        else:
            out.append((s, e))
    return tuple(out)


def reduce_word(letters):
    """Free reduction of a raw letter sequence."""
    return _reduce(tuple(letters))


ONE = FreeWord()


def comm(x: FreeWord, y: FreeWord) -> FreeWord:
    return x * y * x.inv() * y.inv()


def conj(x: FreeWord, y: FreeWord) -> FreeWord:
    """^x y."""
    return x * y * x.inv()


def prod(words):
    return _fold(lambda a, b: a * b, words, ONE)


def _gens(*names):
    return [FreeWord.gen(n) for n in names]


def _c1():
    x, y, z = _gens("x", "y", "z")
    return comm(x, y * z), comm(x, y) * conj(y, comm(x, z))


def _c1_plus(k):
    x = FreeWord.gen("x")
    u = _gens(*(f"u{i}" for i in range(1, k + 1)))
    rhs = prod(conj(prod(u[:i]), comm(x, u[i])) for i in range(k))
    return comm(x, prod(u)), rhs


def _c2():
    x, y, z = _gens("x", "y", "z")
    return comm(x * y, z), conj(x, comm(y, z)) * comm(x, z)


def _c2_plus(k):
    x = FreeWord.gen("x")
    u = _gens(*(f"u{i}" for i in range(1, k + 1)))
    rhs = prod(conj(prod(u[: k - i]), comm(u[k - i], x)) for i in range(1, k + 1))
    return comm(prod(u), x), rhs


def _c3():
    x, y, z = _gens("x", "y", "z")
    lhs = (
        conj(x, comm(comm(x.inv(), y), z))
        * conj(z, comm(comm(z.inv(), x), y))
        * conj(y, comm(comm(y.inv(), z), x))
    )
    return lhs, ONE


def _c4():
    x, y, z = _gens("x", "y", "z")
    return comm(x, conj(y, z)), conj(y, comm(conj(y.inv(), x), z))


def _c5():
    x, y, z = _gens("x", "y", "z")
    return comm(conj(y, x), z), conj(y, comm(x, conj(y.inv(), z)))


def _c8():
    # the last factor is read as [[x^-1, y^-1], y^-1]
    x, y = _gens("x", "y")
    xi, yi = x.inv(), y.inv()
    return (x * y) * (x * y), x * x * y * y * comm(yi, xi) * comm(comm(xi, yi), yi)


IDENTITIES = {
    "C1": lambda: [_c1()],
    "C1+": lambda: [_c1_plus(k) for k in range(1, 7)],
    "C2": lambda: [_c2()],
    "C2+": lambda: [_c2_plus(k) for k in range(1, 7)],
    "C3": lambda: [_c3()],
    "C4": lambda: [_c4()],
    "C5": lambda: [_c5()],
    "C8": lambda: [_c8()],
}


def identity_sides(identity_id: str):
    """List of (lhs, rhs) reduced words for the named identity."""
    try:
        return IDENTITIES[identity_id]()
    except KeyError:
        raise ValueError(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITIES)}") from None


def free_identity_check(identity_id: str) -> bool:
    """True iff both sides have equal reduced normal forms (every k for C1+/C2+)."""
    return all(lhs == rhs for lhs, rhs in identity_sides(identity_id))
