"""Small exact (Fraction) linear algebra plus the float kernel-rank rule."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def rref(M):
    """Reduced row echelon form of a Fraction matrix; returns (R, pivot columns)."""
    R = [list(map(Fraction, row)) for row in np.asarray(M)]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        out[i, :] = R[i]
    return out, pivots


def exact_rank(M):
    return len(rref(M)[1])


def exact_nullspace(M):
    """Basis of {x : M x = 0} as rows of a Fraction array (one row per free column)."""
    M = np.asarray(M)
    cols = M.shape[1]
    R, pivots = rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.empty((len(free), cols), dtype=object)
    basis.fill(Fraction(0))
    for k, f in enumerate(free):
        basis[k, f] = Fraction(1)
        for r, p in enumerate(pivots):
            basis[k, p] = -R[r, f]
    return basis


def exact_solve(G, rhs):
    """Solve G x = rhs for square invertible Fraction G."""
    G = np.asarray(G)
    aug = np.concatenate([G, np.asarray(rhs).reshape(len(rhs), -1)], axis=1)
    R, pivots = rref(aug)
    if pivots[: G.shape[1]] != list(range(G.shape[1])):
        raise np.linalg.LinAlgError("singular system")
    return R[: G.shape[1], G.shape[1]:].reshape(np.asarray(rhs).shape)


class IndeterminateRank(RuntimeError):
    """A singular value fell inside the guard band around the kernel threshold."""


def kernel_dim_from_singular_values(sv, tol=1e-6, guard=10.0, scale=None):
    """Count singular values below tol * scale, refusing ambiguous spectra.

    `scale` defaults to the largest singular value.  Any singular value in
    [tol * scale, guard * tol * scale] raises IndeterminateRank.
    """
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0
    scale = float(np.max(sv)) if scale is None else float(scale)
    if scale == 0.0:
        return int(sv.size)
    lo, hi = tol * scale, guard * tol * scale
    ambiguous = sv[(sv >= lo) & (sv <= hi)]
    if ambiguous.size:
        raise IndeterminateRank(
            f"singular value {ambiguous.min():.3e} inside guard band [{lo:.3e}, {hi:.3e}]")
    return int(np.count_nonzero(sv < lo))
