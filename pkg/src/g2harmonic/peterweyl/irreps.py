"""Explicit real orthogonal Spin(7) irreps as subspaces of tensor powers of the spin module.

The spin module is spanned by the Clifford matrices of ``clifford``.  Every
other irrep V_w is carved out of a product V_u (x) V_v of irreps already
built, as the eigenspace of the product Casimir with value casimir(w); the
construction is accepted only if that eigenspace has the Weyl dimension.
The vector and Lambda^2 modules come from spin (x) spin, all others from
V_{w - f} (x) V_f for a fundamental weight f, where V_w is the top Casimir
component.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from ..clifford import spin_lift
from ..homogeneous import PAIRS, elementary_skew
from .weights import Weight, as_weight, casimir, weyl_dimension

SO7_DIM = len(PAIRS)
SPIN = Weight(0, 0, 1)
FUNDAMENTALS = (Weight(0, 0, 1), Weight(1, 0, 0), Weight(0, 1, 0))
CACHE_VERSION = 1


class IrrepConstructionError(RuntimeError):
    """A Casimir eigenspace did not isolate the predicted Weyl dimension."""


@dataclass(frozen=True)
class Irrep:
    weight: Weight
    dim: int
    action: np.ndarray  # action[a] = rho(E_ij - E_ji) for the a-th pair i < j
    casimir: float

    def rho(self, Z):
        """rho of a skew 7x7 matrix Z (float)."""
        coeffs = np.array([float(Z[i, j]) for i, j in PAIRS])
        return np.tensordot(coeffs, self.action, axes=(0, 0))

    def casimir_matrix(self):
        return -np.einsum("aij,ajk->ik", self.action, self.action)

    def checksum(self):
        return hashlib.sha256(np.ascontiguousarray(self.action).tobytes()).hexdigest()


def spin_irrep():
    action = np.array([spin_lift(elementary_skew(i, j).astype(float)) for i, j in PAIRS])
    return Irrep(SPIN, 8, action, float(casimir(SPIN)))


def trivial_irrep():
    return Irrep(Weight(0, 0, 0), 1, np.zeros((SO7_DIM, 1, 1)), 0.0)


def _product_casimir(U, V):
    n = U.dim * V.dim
    # sum_a kron(U_a, V_a) as one matrix product
    K = np.tensordot(U.action, V.action, axes=(0, 0)).transpose(0, 2, 1, 3).reshape(n, n)
    C = -2.0 * K
    C[np.diag_indices(n)] += U.casimir + V.casimir
    return C


def _restrict(U, V, Q):
    """Action of U (x) V restricted to the orthonormal columns of Q."""
    k = Q.shape[1]
    Qt = Q.T.reshape(k, U.dim, V.dim)
    out = np.empty((SO7_DIM, k, k))
    for a in range(SO7_DIM):
        img = np.matmul(U.action[a], Qt) + np.matmul(Qt, V.action[a].T)
        out[a] = Qt.reshape(k, -1) @ img.reshape(k, -1).T
    return out


def _casimir_component(U, V, w, top):
    target = float(casimir(w))
    dim = weyl_dimension(w)
    C = _product_casimir(U, V)
    n = C.shape[0]
    if top:
        lo = max(n - dim - 1, 0)
        vals, vecs = sla.eigh(C, subset_by_index=[lo, n - 1], driver="evr")
        keep = np.abs(vals - target) < 1e-6 * max(1.0, target)
        if keep.sum() != dim or (lo > 0 and abs(vals[0] - target) < 1e-3):
            raise IrrepConstructionError(f"top Casimir component of {U.weight} x {V.weight} is not {w}")
    else:
        vals, vecs = np.linalg.eigh(C)
        keep = np.abs(vals - target) < 1e-6 * max(1.0, target)
        if keep.sum() != dim:
            raise IrrepConstructionError(
                f"Casimir {target} eigenspace in {U.weight} x {V.weight} has dimension {keep.sum()}, expected {dim}")
    Q = vecs[:, keep]
    return Irrep(w, dim, _restrict(U, V, Q), target)


def _recipe(w):
    """(u, v, top) describing which product V_w is cut out of."""
    if w in (Weight(1, 0, 0), Weight(0, 1, 0), Weight(0, 0, 2)):
        return SPIN, SPIN, w == Weight(0, 0, 2)
    best = None
    for f in FUNDAMENTALS:
        rest = Weight(*(x - y for x, y in zip(w, f)))
        if min(rest) < 0 or rest == Weight(0, 0, 0):
            continue
        cost = weyl_dimension(rest) * weyl_dimension(f)
        if best is None or cost < best[0]:
            best = (cost, rest, f)
    return best[1], best[2], True


_DISK_CACHE = {"dir": None}


def set_cache_dir(path):
    """Persist built irreps under `path` (None disables the disk cache)."""
    _DISK_CACHE["dir"] = path
    if path:
        os.makedirs(path, exist_ok=True)


def _cache_path(w):
    d = _DISK_CACHE["dir"]
    return None if d is None else os.path.join(d, f"irrep_{w.a}_{w.b}_{w.c}.npz")


def _load(w):
    path = _cache_path(w)
    if path is None or not os.path.exists(path):
        return None
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        action = data["action"]
    rep = Irrep(w, int(meta["dim"]), action, float(meta["casimir"]))
    if meta.get("version") != CACHE_VERSION or tuple(meta["weight"]) != tuple(w) or rep.checksum() != meta["checksum"]:
        return None
    return rep


def _store(rep):
    path = _cache_path(rep.weight)
    if path is None:
        return
    meta = {"version": CACHE_VERSION, "weight": list(rep.weight), "dim": rep.dim,
            "casimir": rep.casimir, "checksum": rep.checksum()}
    tmp = path + ".tmp.npz"
    np.savez(tmp, meta=json.dumps(meta, sort_keys=True), action=rep.action)
    os.replace(tmp, path)


@lru_cache(maxsize=None)
def build_irrep(w):
    w = as_weight(w)
    if w == Weight(0, 0, 0):
        return trivial_irrep()
    if w == SPIN:
        return spin_irrep()
    cached = _load(w)
    if cached is not None:
        return cached
    u, v, top = _recipe(w)
    rep = _casimir_component(build_irrep(u), build_irrep(v), w, top)
    _store(rep)
    return rep


def irrep_checks(rep, tol=1e-8):
    """(bracket residual, Casimir residual, skewness residual) of a built irrep."""
    skew = max(np.abs(a + a.T).max() for a in rep.action) if rep.dim else 0.0
    worst = 0.0
    for a, (i, j) in enumerate(PAIRS):
        for b, (k, l) in enumerate(PAIRS):
            Z = elementary_skew(i, j).astype(float) @ elementary_skew(k, l).astype(float)
            Z = Z - Z.T
            lhs = rep.action[a] @ rep.action[b] - rep.action[b] @ rep.action[a]
            worst = max(worst, np.abs(lhs - rep.rho(Z)).max())
    cas = np.abs(rep.casimir_matrix() - rep.casimir * np.eye(rep.dim)).max()
    return worst, cas, skew


buildIrrep = build_irrep
