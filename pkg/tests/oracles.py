"""Independent brute-force oracles built only from the standard monomial lists."""

from fractions import Fraction
from math import comb

PHI0 = [(1, (1, 2, 3)), (1, (1, 7, 6)), (1, (2, 5, 7)), (1, (6, 5, 3)),
        (1, (1, 4, 5)), (1, (2, 4, 6)), (1, (3, 4, 7))]
PSI0 = [(1, (4, 5, 6, 7)), (-1, (2, 3, 4, 5)), (1, (1, 3, 4, 6)), (-1, (1, 2, 4, 7)),
        (1, (2, 3, 6, 7)), (1, (1, 3, 5, 7)), (1, (1, 2, 5, 6))]


def sign(seq):
    """Sign of the permutation sorting seq; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def evaluate(terms, *idx):
    """Value of sum c e^{I} on basis vectors e_{idx} (determinant convention)."""
    total = 0
    for c, mono in terms:
        if sorted(mono) == sorted(idx):
            # e^{I}(e_{sigma(I)}) = sign(sigma)
            perm = [mono.index(i) for i in idx]
            total += c * sign(perm)
    return total


def dense(terms):
    """{sorted index tuple: coefficient} for a list of (coeff, monomial)."""
    out = {}
    for c, mono in terms:
        key = tuple(sorted(mono))
        out[key] = out.get(key, 0) + c * sign(mono)
    return {k: v for k, v in out.items() if v}


def wedge_terms(a, b):
    out = []
    for c1, m1 in a:
        for c2, m2 in b:
            if not set(m1) & set(m2):
                out.append((c1 * c2, tuple(m1) + tuple(m2)))
    return dense(out)


def cross_oracle(a, b):
    """A(e_a, e_b) as a list: component x is phi0(e_x, e_a, e_b)."""
    return [evaluate(PHI0, x, a, b) for x in range(1, 8)]


def chi_oracle(a, b, c):
    """chi with 1/2 g(X, chi(Y,Z,W)) = psi(X,Y,Z,W)."""
    return [2 * evaluate(PSI0, x, a, b, c) for x in range(1, 8)]


def weyl_dimensions():
    """Dimensions of small so(7) irreps, from standard tables."""
    return {(0, 0, 0): 1, (1, 0, 0): 7, (0, 1, 0): 21, (0, 0, 1): 8, (2, 0, 0): 27, (0, 0, 2): 35,
            (1, 0, 1): 48, (1, 1, 0): 105, (0, 1, 1): 112, (3, 0, 0): 77, (0, 2, 0): 168,
            (0, 0, 3): 112, (2, 0, 1): 168, (1, 0, 2): 189}


def sphere_harmonic_dims(k):
    """dim of degree-k spherical harmonics on S^7: C(k+7,7) - C(k+5,7)."""
    return comb(k + 7, 7) - comb(k + 5, 7)


def laplace_eigenvalue(k):
    """k(k + n - 1) on the unit S^n, n = 7."""
    return Fraction(k * (k + 6))


def dirac_multiplicity(k):
    """Multiplicity of each of +-(7/2 + k) for the Dirac operator of the round S^7."""
    return 8 * comb(k + 6, 6)
