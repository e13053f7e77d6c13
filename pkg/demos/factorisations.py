"""Constructive words: a Whitehead factorisation and a rewritten conjugate."""

import numpy as np

from relcomm.elementary import Elem, ElemWord, format_word, rewrite_conjugated_generator, whitehead_factor
from relcomm.matrices import MatSpace, random_congruence_element
from relcomm.rings import parse_ideal, parse_ring

if __name__ == "__main__":
    R = parse_ring("zmod:8")
    S = MatSpace(R, 3)
    I = parse_ideal(R, "(2)")
    rng = np.random.default_rng(1)
    x, y = random_congruence_element(S, I, rng), random_congruence_element(S, I, rng)
    w = whitehead_factor(S, x, y, I)
    print(f"[x, y] embedded in degree 6 as a word of {len(w)} top-level letters")
    print("x =", S.fmt(x))
    print("y =", S.fmt(y))

    T = MatSpace(parse_ring("zmod:4"), 3)
    c = ElemWord(T, [Elem(1, 3, 1), Elem(2, 1, 3), Elem(3, 2, 2)])
    z = rewrite_conjugated_generator(c, 1, 2, 2)
    print("\nconjugate of e_12(2) by e_13(1) e_21(3) e_32(2):")
    print(format_word(z))
