"""Dominant weights of B3 = so(7): Weyl dimensions and Casimir values.

Weights (a, b, c) are in the fundamental-weight basis; omega_1 is the
vector representation, omega_2 = Lambda^2 and omega_3 the spin
representation.  In the orthogonal basis eps_1..eps_3,

    a omega_1 + b omega_2 + c omega_3 = (a + b + c/2, b + c/2, c/2).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple

RHO = (Fraction(5, 2), Fraction(3, 2), Fraction(1, 2))


class Weight(NamedTuple):
    a: int
    b: int
    c: int

    def level(self):
        return self.a + self.b + self.c

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def as_weight(w):
    w = Weight(*w)
    if min(w) < 0:
        raise ValueError(f"weight {tuple(w)} is not dominant")
    return w


def _positive_roots():
    roots = []
    for i in range(3):
        e = [0, 0, 0]
        e[i] = 1
        roots.append(tuple(e))
        for j in range(i + 1, 3):
            for s in (1, -1):
                r = [0, 0, 0]
                r[i], r[j] = 1, s
                roots.append(tuple(r))
    return roots


POSITIVE_ROOTS = _positive_roots()


def orthogonal_coords(w):
    a, b, c = as_weight(w)
    half = Fraction(c, 2)
    return (a + b + half, b + half, half)


def weyl_dimension(w):
    lam = orthogonal_coords(w)
    num = den = Fraction(1)
    for r in POSITIVE_ROOTS:
        num *= sum((l + p) * x for l, p, x in zip(lam, RHO, r))
        den *= sum(p * x for p, x in zip(RHO, r))
    out = num / den
    assert out.denominator == 1
    return int(out)


def casimir(w):
    """<lambda, lambda + 2 rho>; equals -sum rho(E_ij - E_ji)^2 over i < j."""
    lam = orthogonal_coords(w)
    return sum(l * (l + 2 * p) for l, p in zip(lam, RHO))


def enumerate_weights(max_level):
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    return sorted(Weight(*w) for w in itertools.product(range(max_level + 1), repeat=3)
                  if sum(w) <= max_level)


enumerateWeights = enumerate_weights
