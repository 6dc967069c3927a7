"""Peter-Weyl blocks: G2-modules, homogeneous bundles and Hom_{G2}(V_lambda, W).

A section of the bundle Spin(7) x_{G2} W restricted to the isotypic piece of
V_lambda is v (x) X with X in Hom_{G2}(V_lambda, W).  Every W used here is a
G2-submodule of one of a few ambient so(7)-modules (forms, tensors, spinors),
given by an orthogonal projector.  Hom elements are stored as d x q arrays in
"Q coordinates": Q is the orthonormal basis of the G2-isotypic components of
V_lambda of types 1, 7, 14, 27, the only types occurring in any W.  An
intertwiner vanishes on the other isotypic components, so nothing is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import exterior as ex
from ..clifford import s32_projector_matrix, spin_generators
from ..exterior import DIM
from ..g2algebra import project2, project3, standard_structure
from ..homogeneous import _projector_matrix, round_sphere
from ..linalg import IndeterminateRank, kernel_dim_from_singular_values
from .irreps import build_irrep
from .weights import as_weight

G2_TYPES = (1, 7, 14, 27)
HOM_TOL = 1e-9


# --- ambient modules ---------------------------------------------------------

@dataclass(frozen=True)
class Module:
    """An so(7)-module given by generators: tau(B) = sum_ab B[a, b] gens[a, b]."""
    name: str
    gens: np.ndarray

    @property
    def dim(self):
        return self.gens.shape[2]

    def tau(self, B):
        return np.tensordot(np.asarray(B, dtype=float), self.gens, axes=([0, 1], [0, 1]))


def _kron_gens(G1, G2):
    d1, d2 = G1.shape[2], G2.shape[2]
    out = np.einsum("abij,kl->abikjl", G1, np.eye(d2)) + np.einsum("ij,abkl->abikjl", np.eye(d1), G2)
    return out.reshape(DIM, DIM, d1 * d2, d1 * d2)


def _vector_gens():
    G = np.zeros((DIM, DIM, DIM, DIM))
    for a in range(DIM):
        for b in range(DIM):
            G[a, b, a, b] = 1.0
    return G


@lru_cache(maxsize=None)
def module(name):
    if name.startswith("L") and name[1:].isdigit():
        return Module(name, ex.endo_generators(int(name[1:])).astype(float))
    if name == "TT":
        V = _vector_gens()
        return Module(name, _kron_gens(V, V))
    if name == "S":
        return Module(name, spin_generators().astype(float) / 4.0)
    if name == "ST":
        return Module(name, _kron_gens(spin_generators().astype(float) / 4.0, _vector_gens()))
    raise KeyError(name)


# --- bundles -----------------------------------------------------------------

def _float_projector(fn, p, part):
    return ex.to_float(_projector_matrix(lambda u: fn(u)[part], p))


def _sym0_projector():
    n = DIM * DIM
    P = np.zeros((n, n))
    for k in range(n):
        t = np.zeros(n)
        t[k] = 1.0
        t = t.reshape(DIM, DIM)
        s = 0.5 * (t + t.T) - np.trace(t) / DIM * np.eye(DIM)
        P[:, k] = s.ravel()
    return P


@dataclass(frozen=True)
class Bundle:
    tag: str
    module: str
    projector: np.ndarray | None = None  # orthogonal projector in ambient coordinates

    @property
    def rank(self):
        if self.projector is None:
            return module(self.module).dim
        return int(round(np.trace(self.projector)))


@lru_cache(maxsize=None)
def bundle(tag):
    s = standard_structure(True)
    table = {
        "Functions": ("L0", None),
        "OneForms": ("L1", None),
        "TwoForms": ("L2", None),
        "ThreeForms": ("L3", None),
        "FourForms": ("L4", None),
        "TwoTensors": ("TT", None),
        "Spinors": ("S", None),
        "SpinorValued1Forms": ("ST", None),
    }
    if tag in table:
        name, P = table[tag]
        return Bundle(tag, name, P)
    if tag == "TwoForms7":
        return Bundle(tag, "L2", _float_projector(lambda u: project2(u, s), 2, 0))
    if tag == "TwoForms14":
        return Bundle(tag, "L2", _float_projector(lambda u: project2(u, s), 2, 1))
    if tag in ("ThreeForms1", "ThreeForms7", "ThreeForms27"):
        part = {"ThreeForms1": 0, "ThreeForms7": 1, "ThreeForms27": 2}[tag]
        return Bundle(tag, "L3", _float_projector(lambda u: project3(u, s), 3, part))
    if tag == "Sym0":
        return Bundle(tag, "TT", _sym0_projector())
    if tag == "S32":
        return Bundle(tag, "ST", np.array(s32_projector_matrix(False)))
    raise KeyError(f"unknown bundle {tag!r}")


BUNDLE_TAGS = ("Functions", "OneForms", "TwoForms7", "TwoForms14", "ThreeForms27", "Sym0",
               "Spinors", "SpinorValued1Forms", "S32")


# --- the fixed Lie-algebra data ------------------------------------------------

@lru_cache(maxsize=1)
def g2_orthonormal_basis():
    """The 14 h-basis matrices, Gram-Schmidt orthonormalized for tr(a^T b)."""
    H = np.array([ex.to_float(h) for h in round_sphere().h_basis]).reshape(14, -1)
    q, _ = np.linalg.qr(H.T)
    out = q.T.reshape(14, DIM, DIM)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1)
def m_basis_float():
    out = np.array([ex.to_float(m) for m in round_sphere().m_basis])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1)
def cross_endos():
    s = standard_structure(False)
    out = np.array([s.cross_endo(ex.unit_vector(i + 1, False)) for i in range(DIM)])
    out.setflags(write=False)
    return out


def g2_casimir(mod):
    """-sum_k tau(h_k)^2 over the orthonormal g2 basis, on an ambient module."""
    T = np.array([mod.tau(h) for h in g2_orthonormal_basis()])
    return -sum(t @ t for t in T)


@lru_cache(maxsize=1)
def g2_type_casimirs():
    """Casimir value of each G2 type 1, 7, 14, 27 in the orthonormal normalization."""
    vals = {1: 0.0}
    for name, t in (("L1", 7), ("L2", 14), ("L3", 27)):
        ev = np.linalg.eigvalsh(g2_casimir(module(name)))
        ev = np.round(ev, 8)
        uniq, counts = np.unique(ev, return_counts=True)
        vals[t] = float(uniq[list(counts).index(t)])
    return vals


# --- per-weight data -----------------------------------------------------------

@dataclass(frozen=True)
class WeightData:
    """Reduced data for one irrep: Q coordinates, m- and h-actions in them."""
    weight: tuple
    dim: int
    casimir: float
    Q: np.ndarray          # n x q, orthonormal columns
    multiplicities: dict   # G2 type -> multiplicity inside V_lambda
    R: np.ndarray          # (7, q, q): Q^T rho(m_i) Q
    R2: np.ndarray         # (7, q, q): Q^T rho(m_i)^2 Q
    H: np.ndarray          # (14, q, q): Q^T rho(h_k) Q

    @property
    def q(self):
        return self.Q.shape[1]


@lru_cache(maxsize=None)
def weight_data(w):
    w = as_weight(w)
    rep = build_irrep(w)
    n = rep.dim
    ms = m_basis_float()
    rho_m = np.array([rep.rho(m) for m in ms])
    scale = float(round_sphere().metric_scale)
    # so(7) = h + m orthogonally for the trace form; trace-orthonormal so(7)
    # bases give -sum rho^2 = casimir / 2, and m_i / |m_i| is trace-orthonormal.
    cas_m = -scale * sum(r @ r for r in rho_m)
    cas_h = rep.casimir / 2.0 * np.eye(n) - cas_m
    cas_h = 0.5 * (cas_h + cas_h.T)
    vals, vecs = np.linalg.eigh(cas_h)
    keep = np.zeros(n, dtype=bool)
    mult = {}
    for t, c in g2_type_casimirs().items():
        near = np.abs(vals - c) < 1e-6 * max(1.0, abs(c))
        if np.any((np.abs(vals - c) < 1e-3) & ~near):
            raise IndeterminateRank(f"G2 Casimir eigenvalue of {w} too close to the type-{t} value")
        count = int(near.sum())
        if count % t:
            raise IndeterminateRank(f"type-{t} isotypic dimension {count} of {w} is not a multiple of {t}")
        mult[t] = count // t
        keep |= near
    Q = vecs[:, keep]
    MQ = np.matmul(rho_m, Q)
    R = np.matmul(Q.T, MQ)
    R2 = -np.matmul(MQ.transpose(0, 2, 1), MQ)
    Hk = np.array([Q.T @ rep.rho(h) @ Q for h in g2_orthonormal_basis()])
    for arr in (Q, R, R2, Hk):
        arr.setflags(write=False)
    return WeightData(tuple(w), n, rep.casimir, Q, mult, R, R2, Hk)


# --- the Hom solver ----------------------------------------------------------

def expected_hom_dim(wd, mod_name):
    mod = module(mod_name)
    ev = np.linalg.eigvalsh(g2_casimir(mod))
    total = 0
    for t, c in g2_type_casimirs().items():
        f = int(np.sum(np.abs(ev - c) < 1e-6 * max(1.0, abs(c))))
        total += wd.multiplicities[t] * (f // t)
    return total


def _eig_i(A):
    """Eigen-decomposition of the Hermitian matrix i*A for real skew A."""
    return np.linalg.eigh(1j * A)


def _support(a, b, scale):
    diff = np.abs(a[:, None] - b[None, :])
    lo, hi = 1e-6 * scale, 1e-3 * scale
    if np.any((diff >= lo) & (diff <= hi)):
        return None
    return np.nonzero(diff < lo)


def _hom_basis(wd, mod):
    """Real orthonormal basis of Hom_{g2}(V, W) in Q coordinates, shape (k, d, q)."""
    d, q = mod.dim, wd.q
    if q == 0:
        return np.zeros((0, d, 0))
    taus = np.array([mod.tau(h) for h in g2_orthonormal_basis()])
    rhos = wd.H
    scale = max(1.0, np.abs(taus).max(), np.abs(rhos).max())
    rng = np.random.default_rng(20240607)
    for _ in range(8):
        c = rng.standard_normal(14)
        a, UF = _eig_i(np.tensordot(c, taus, axes=(0, 0)))
        b, UV = _eig_i(np.tensordot(c, rhos, axes=(0, 0)))
        sup = _support(a, b, scale)
        if sup is not None:
            break
    else:
        raise IndeterminateRank("no generic element of g2 separates the weights")
    sp, sq = sup
    s = len(sp)
    if s == 0:
        return np.zeros((0, d, q))
    T = np.matmul(np.matmul(UF.conj().T, taus), UF)
    P = np.matmul(np.matmul(UV.conj().T, rhos), UV)
    # Gram matrix of y -> (T_k Y - Y P_k)_k restricted to the support pairs
    TT = np.einsum("kji,kjl->il", T.conj(), T)
    PP = np.einsum("kij,klj->il", P.conj(), P)
    G = TT[np.ix_(sp, sp)] * (sq[:, None] == sq[None, :])
    G += (sp[:, None] == sp[None, :]) * PP[np.ix_(sq, sq)]
    for Tk, Pk in zip(T, P):
        G += 2.0 * Tk[np.ix_(sp, sp)] * Pk[np.ix_(sq, sq)].T
    G = 0.5 * (G + G.conj().T)
    vals, vecs = np.linalg.eigh(G)
    k = kernel_dim_from_singular_values(np.abs(vals), tol=1e-10, guard=1e3,
                                        scale=max(1.0, float(np.abs(vals).max())))
    null = vecs[:, :k]
    Y = np.zeros((k, d, q), dtype=complex)
    Y[:, sp, sq] = null.T
    Y = np.matmul(np.matmul(UF, Y), UV.conj().T)
    if k == 0:
        return np.zeros((0, d, q))
    stack = np.concatenate([Y.real, Y.imag]).reshape(2 * k, -1)
    _, sv, vt = np.linalg.svd(stack, full_matrices=False)
    rank = len(sv) - kernel_dim_from_singular_values(sv, tol=1e-8, scale=1.0)
    if rank != k:
        raise IndeterminateRank(f"real form of the Hom space has rank {rank}, expected {k}")
    return vt[:k].reshape(k, d, q)


def intertwiner_residual(wd, mod, basis):
    if len(basis) == 0:
        return 0.0
    worst = 0.0
    for h, rho in zip(g2_orthonormal_basis(), wd.H):
        tau = mod.tau(h)
        worst = max(worst, float(np.abs(np.matmul(tau, basis) - np.matmul(basis, rho)).max()))
    return worst


@lru_cache(maxsize=None)
def _module_hom(w, mod_name):
    wd = weight_data(w)
    mod = module(mod_name)
    basis = _hom_basis(wd, mod)
    expected = expected_hom_dim(wd, mod_name)
    if len(basis) != expected:
        raise IndeterminateRank(
            f"Hom({w}, {mod_name}) has dimension {len(basis)}, branching predicts {expected}")
    res = intertwiner_residual(wd, mod, basis)
    if res > HOM_TOL:
        raise IndeterminateRank(f"Hom({w}, {mod_name}) basis fails to intertwine: {res:.2e}")
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class HomBlock:
    weight: tuple
    bundle: Bundle
    basis: np.ndarray  # (blockDim, d_ambient, q), orthonormal for the trace pairing

    @property
    def block_dim(self):
        return self.basis.shape[0]

    @property
    def module(self):
        return module(self.bundle.module)

    def coords(self, X):
        """Coefficients of a stack of ambient Hom elements in this basis."""
        X = np.asarray(X)
        return np.tensordot(X.reshape(X.shape[0], -1), self.basis.reshape(self.block_dim, -1),
                            axes=(1, 1)).T


@lru_cache(maxsize=None)
def hom_space(w, tag):
    w = as_weight(w)
    b = bundle(tag)
    full = _module_hom(w, b.module)
    if b.projector is None or len(full) == 0:
        return HomBlock(tuple(w), b, full)
    proj = np.matmul(b.projector, full)
    flat = proj.reshape(len(full), -1)
    _, sv, vt = np.linalg.svd(flat, full_matrices=False)
    # basis and projector are orthonormal, so singular values are on the scale 1
    nullity = kernel_dim_from_singular_values(sv, tol=1e-8, scale=1.0)
    rank = len(sv) - nullity
    basis = vt[:rank].reshape(rank, *full.shape[1:])
    basis.setflags(write=False)
    return HomBlock(tuple(w), b, basis)


def block_dims(w):
    return {tag: hom_space(w, tag).block_dim for tag in BUNDLE_TAGS}


homSpace = hom_space
