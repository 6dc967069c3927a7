"""Invariant differential operators as finite matrices on Peter-Weyl blocks.

On the block of V_lambda a section is v (x) X with X in Hom_{G2}(V_lambda, W)
and the canonical connection acts by

    nablabar_{e_i} X = -X rho_lambda(m(e_i)).

The Levi-Civita connection is nabla_X = nablabar_X + 1/3 (A_X)_* on every
tensor bundle and on spinors (where (A_X)_* = 1/2 (X _| phi).).  Operators are
applied to stacks of Hom elements of shape (k, d, q) in ambient coordinates;
`block_operator` turns such a map into a matrix between two HomBlocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import exterior as ex
from ..clifford import SPIN_DIM, clifford_basis, embed_spinor, form_matrix, contraction
from ..exterior import DIM, interior
from ..g2algebra import jmap, standard_structure
from ..homogeneous import CANONICAL, LEVI_CIVITA, curvature, round_sphere
from ..linalg import kernel_dim_from_singular_values
from .homspace import HomBlock, cross_endos, hom_space, module, weight_data
from .weights import as_weight

KERNEL_TOL = 1e-6
GUARD = 10.0


# --- constant ambient matrices ---------------------------------------------------

def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def wedge_symbols(p):
    return _frozen(ex.wedge_basis_matrices(p))


@lru_cache(maxsize=None)
def interior_symbols(p):
    return _frozen(ex.interior_basis_matrices(p))


@lru_cache(maxsize=None)
def hodge(p):
    return _frozen(ex.hodge_matrix(p))


@lru_cache(maxsize=1)
def gammas():
    return _frozen(ex.to_float(clifford_basis(True)))


@lru_cache(maxsize=None)
def clifford_form(name):
    """Clifford action of phi, psi, vol on spinors."""
    s = standard_structure(True)
    u = {"phi": s.phi, "psi": s.psi, "vol": s.vol()}[name]
    return _frozen(ex.to_float(form_matrix(u)))


@lru_cache(maxsize=1)
def phi_contractions():
    """(e_j _| phi). as 8x8 matrices, j = 1..7."""
    s = standard_structure(True)
    return _frozen([ex.to_float(form_matrix(interior(ex.unit_vector(j + 1), s.phi))) for j in range(DIM)])


@lru_cache(maxsize=1)
def psi_double_contractions():
    """(e_i _| e_j _| psi). as an array [i, j] of 8x8 matrices."""
    s = standard_structure(True)
    out = np.zeros((DIM, DIM, SPIN_DIM, SPIN_DIM))
    for i in range(DIM):
        for j in range(DIM):
            u = interior(ex.unit_vector(i + 1), interior(ex.unit_vector(j + 1), s.psi))
            out[i, j] = ex.to_float(form_matrix(u))
    return _frozen(out)


def kron_spin(M):
    """M (x) Id on S (x) T (row-major 8x7 arrays)."""
    return np.kron(M, np.eye(DIM))


def kron_vec(B):
    """Id (x) B on S (x) T."""
    return np.kron(np.eye(SPIN_DIM), B)


@lru_cache(maxsize=None)
def column_embeddings(rows):
    """E[i] puts a length-`rows` vector into column i of a rows x 7 array."""
    E = np.zeros((DIM, rows * DIM, rows))
    for i in range(DIM):
        for a in range(rows):
            E[i, a * DIM + i, a] = 1.0
    return _frozen(E)


@lru_cache(maxsize=1)
def psi_map():
    """Psi: T (x) T -> S (x) T, H -> (X -> H(X) . kappa_0); entry [1 + a, i] = H[a, i]."""
    P = np.zeros((SPIN_DIM * DIM, DIM * DIM))
    for a in range(DIM):
        for i in range(DIM):
            P[(1 + a) * DIM + i, a * DIM + i] = 1.0
    return _frozen(P)


@lru_cache(maxsize=1)
def iota_matrix():
    """iota: S -> S (x) T, kappa -> -1/7 sum e_i . kappa (x) e_i."""
    cols = [embed_spinor(np.eye(SPIN_DIM)[:, a]).ravel() for a in range(SPIN_DIM)]
    return _frozen(np.stack(cols, axis=1))


@lru_cache(maxsize=1)
def contraction_matrix():
    """pi: S (x) T -> S, sum_i alpha^(i) (x) e_i -> sum_i e_i . alpha^(i)."""
    cols = [contraction(np.eye(SPIN_DIM * DIM)[:, k].reshape(SPIN_DIM, DIM)) for k in range(SPIN_DIM * DIM)]
    return _frozen(np.stack(cols, axis=1))


@lru_cache(maxsize=1)
def imap_matrix():
    """i(B) = -2 B_* phi on 2-tensors (49 -> 35)."""
    G3 = ex.endo_generators(3).astype(float)
    phi = ex.to_float(standard_structure(True).phi.coeffs)
    return _frozen(-2.0 * np.einsum("abij,j->iab", G3, phi).reshape(len(phi), DIM * DIM))


@lru_cache(maxsize=1)
def jmap_matrix():
    cols = []
    for k in range(len(ex.SUBSETS[3])):
        cols.append(ex.to_float(jmap(ex.basis_form(3, k))).ravel())
    return _frozen(np.stack(cols, axis=1))


@lru_cache(maxsize=1)
def form2_to_tensor():
    """2-form -> skew 2-tensor t with beta = sum_ab t_ab e_a (x) e_b (49 x 21)."""
    M = np.zeros((DIM * DIM, len(ex.SUBSETS[2])))
    for k, (a, b) in enumerate(ex.SUBSETS[2]):
        M[a * DIM + b, k] = 1.0
        M[b * DIM + a, k] = -1.0
    return _frozen(M)


@lru_cache(maxsize=1)
def tensor_to_form2():
    """Skew part of a 2-tensor as a 2-form (21 x 49)."""
    return _frozen(0.5 * form2_to_tensor().T)


@lru_cache(maxsize=None)
def vector_into(name):
    """X -> X _| phi (7 -> 21) or X -> X _| psi (7 -> 35)."""
    s = standard_structure(True)
    u = {"phi": s.phi, "psi": s.psi}[name]
    return _frozen(np.stack([ex.to_float(interior(ex.unit_vector(b + 1), u).coeffs) for b in range(DIM)], axis=1))


@lru_cache(maxsize=1)
def cross_on_tensors():
    """A_{e_i *} and the twisted extension on 2-tensors (row-major 7x7)."""
    A = cross_endos()
    I = np.eye(DIM)
    star = np.array([np.kron(a, I) + np.kron(I, a) for a in A])
    tilde = np.array([np.kron(a, I) - np.kron(I, a) for a in A])
    return _frozen(star), _frozen(tilde)


@lru_cache(maxsize=None)
def cross_action(mod_name):
    """tau_W(A_{e_i}) for i = 1..7 on an ambient module."""
    mod = module(mod_name)
    return _frozen([mod.tau(a) for a in cross_endos()])


@lru_cache(maxsize=None)
def float_curvature(flavor):
    return _frozen(ex.to_float(curvature(round_sphere(), flavor).R))


@lru_cache(maxsize=None)
def curvature_endo(mod_name, flavor):
    """q(R) = 1/2 sum_ij tau(E_ji - E_ij) tau(R(e_i, e_j)) on an ambient module."""
    mod = module(mod_name)
    R = float_curvature(flavor)
    G = mod.gens
    E = np.swapaxes(G, 0, 1) - G
    K = np.einsum("ijab,abxy->ijxy", R, G)
    return _frozen(0.5 * np.einsum("ijxy,ijyz->xz", E, K))


# --- applying operators to stacks of Hom elements ------------------------------

def _mm(M, X):
    """Apply an ambient matrix to every element of a stack (k, d, q)."""
    return np.matmul(M, X)


class BlockCalculus:
    """The connection, Laplacians and curvature terms on one Peter-Weyl block."""

    def __init__(self, w):
        self.weight = as_weight(w)
        self.wd = weight_data(self.weight)

    def block(self, tag):
        return hom_space(self.weight, tag)

    # first order
    def nablabar(self, X):
        """(7, k, d, q): nablabar_{e_i} X = -X R_i."""
        return -np.matmul(X[None], self.wd.R[:, None])

    def nabla(self, X, mod_name):
        A = cross_action(mod_name)
        return self.nablabar(X) + np.matmul(A[:, None], X[None]) / 3.0

    def first_order(self, X, symbol, mod_name=None, zeroth=None):
        """sum_i symbol[i] nabla_{e_i} X (+ zeroth X); Levi-Civita if mod_name is given."""
        N = self.nablabar(X) if mod_name is None else self.nabla(X, mod_name)
        out = np.einsum("iab,ikbq->kaq", np.asarray(symbol), N)
        if zeroth is not None:
            out = out + _mm(zeroth, X)
        return out

    # second order
    def rough_bar(self, X):
        """nablabar^* nablabar = -sum_i nablabar_i nablabar_i."""
        return -np.matmul(X[None], self.wd.R2[:, None]).sum(axis=0) if X.shape[0] else X.copy()

    def rough(self, X, mod_name):
        """nabla^* nabla; the frame-slot correction vanishes since A_{e_i} e_i = 0."""
        if not X.shape[0]:
            return X.copy()
        A = cross_action(mod_name)
        out = -np.matmul(X[None], self.wd.R2[:, None]).sum(axis=0)
        XR = np.matmul(X[None], self.wd.R[:, None])
        out += (2.0 / 3.0) * np.matmul(A[:, None], XR).sum(axis=0)
        A2 = np.matmul(A, A).sum(axis=0)
        out -= _mm(A2, X) / 9.0
        return out

    def laplace(self, X, mod_name):
        return self.rough(X, mod_name) + _mm(curvature_endo(mod_name, LEVI_CIVITA), X)

    def laplace_bar(self, X, mod_name):
        return self.rough_bar(X) + _mm(curvature_endo(mod_name, CANONICAL), X)

    # the standard operators
    def d(self, X, p):
        return self.first_order(X, wedge_symbols(p), f"L{p}")

    def delta(self, X, p):
        return self.first_order(X, -interior_symbols(p), f"L{p}")

    def dbar(self, X, p):
        return self.first_order(X, wedge_symbols(p))

    def deltabar(self, X, p):
        return self.first_order(X, -interior_symbols(p))

    def star_d(self, X):
        return _mm(hodge(4), self.d(X, 3))

    def form_laplace(self, X, p):
        """Hodge Laplacian d delta + delta d on p-forms."""
        out = 0.0
        if p > 0:
            out = out + self.d(self.delta(X, p), p - 1)
        if p < DIM:
            out = out + self.delta(self.d(X, p), p + 1)
        return out

    def dirac(self, X, bar=False):
        return self.first_order(X, gammas(), None if bar else "S")

    def twisted_dirac(self, X, bar=False):
        sym = np.array([kron_spin(c) for c in gammas()])
        return self.first_order(X, sym, None if bar else "ST")

    def killing(self, X, c=0.5):
        """kappa -> (nabla_{e_i} kappa - c e_i . kappa)_i in S (x) T."""
        E = column_embeddings(SPIN_DIM)
        zeroth = -c * np.einsum("iab,ibc->ac", E, gammas())
        return self.first_order(X, E, "S", zeroth)

    def d1_operator(self, X):
        """f -> (nabla_{e_i} f - A_{e_i} f)_i in T (x) T."""
        E = column_embeddings(DIM)
        zeroth = -np.einsum("iab,ibc->ac", E, cross_endos())
        return self.first_order(X, E, "L1", zeroth)

    def divergence_tt(self, X, bar=False):
        """(delta H)_a = -sum_i (nabla_{e_i} H)[a, i] for a 2-tensor H."""
        E = column_embeddings(DIM)
        sym = -np.swapaxes(E, 1, 2)
        return self.first_order(X, sym, None if bar else "TT")

    def cross_derivative(self, X, mod_name, kind="star"):
        """sum_i A_{e_i *} nablabar_{e_i} X (kind 'star'), or the twisted version on 2-tensors."""
        if kind == "star":
            sym = cross_action(mod_name)
        else:
            sym = cross_on_tensors()[1]
        return self.first_order(X, sym)


# --- block matrices -------------------------------------------------------------

@dataclass(frozen=True)
class BlockOperator:
    source: HomBlock
    target: HomBlock
    matrix: np.ndarray
    residual: float = 0.0
    name: str = ""

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other):
        return BlockOperator(other.source, self.target, self.matrix @ other.matrix,
                             max(self.residual, other.residual), f"{self.name}*{other.name}")

    def __add__(self, other):
        return BlockOperator(self.source, self.target, self.matrix + other.matrix,
                             max(self.residual, other.residual), f"{self.name}+{other.name}")

    def __sub__(self, other):
        return BlockOperator(self.source, self.target, self.matrix - other.matrix,
                             max(self.residual, other.residual), f"{self.name}-{other.name}")

    def scaled(self, c):
        return BlockOperator(self.source, self.target, c * self.matrix, self.residual, self.name)

    def adjoint(self):
        return BlockOperator(self.target, self.source, self.matrix.T, self.residual, f"{self.name}^*")

    def symmetry_defect(self):
        if self.matrix.size == 0:
            return 0.0
        return float(np.abs(self.matrix - self.matrix.T).max())


def block_operator(src, tgt, fn, name="", project=False):
    """Matrix of X -> fn(X) from the block `src` to the block `tgt`.

    The residual is the size of the part of fn(X) outside the target block;
    with project=True the target projector is applied first (compressions).
    """
    X = src.basis
    if src.block_dim == 0:
        return BlockOperator(src, tgt, np.zeros((tgt.block_dim, 0)), 0.0, name)
    Y = np.asarray(fn(X))
    if project and tgt.bundle.projector is not None:
        Y = _mm(tgt.bundle.projector, Y)
    M = tgt.coords(Y) if tgt.block_dim else np.zeros((0, src.block_dim))
    back = np.tensordot(M.T, tgt.basis, axes=(1, 0)) if tgt.block_dim else np.zeros_like(Y)
    res = float(np.abs(Y - back).max()) if Y.size else 0.0
    return BlockOperator(src, tgt, M, res, name)


def assemble_first_order(src, tgt, symbol, zeroth=None):
    """Matrix of A -> -sum_i symbol[i] A rho(m(e_i)) + zeroth A between two blocks."""
    if src.weight != tgt.weight:
        raise ValueError(f"weight mismatch: {src.weight} vs {tgt.weight}")
    calc = BlockCalculus(src.weight)
    return block_operator(src, tgt, lambda X: calc.first_order(X, symbol, None, zeroth), "first-order")


def identity_operator(blk):
    return BlockOperator(blk, blk, np.eye(blk.block_dim), 0.0, "id")


# --- kernels ---------------------------------------------------------------------

def kernel_dim(op, shift=0.0, tol=KERNEL_TOL):
    """Dimension of ker(op - shift) for a square BlockOperator (or matrix).

    Singular values are compared against tol times the larger of the norms
    of op - shift, op and |shift|, so that a shift which happens to equal a
    large eigenvalue does not shrink the threshold; values inside the
    10x guard band raise IndeterminateRank.
    """
    M = op.matrix if isinstance(op, BlockOperator) else np.asarray(op)
    if M.shape[0] != M.shape[1]:
        raise ValueError("kernel_dim needs a square operator; use nullity for stacked systems")
    n = M.shape[0]
    if n == 0:
        return 0
    S = M - shift * np.eye(n)
    sv = np.linalg.svd(S, compute_uv=False)
    big = np.linalg.svd(M, compute_uv=False)[0] if n else 0.0
    scale = max(float(sv[0]), float(big), abs(float(shift)), 1.0)
    return kernel_dim_from_singular_values(sv, tol=tol, guard=GUARD, scale=scale)


def null_space(*ops, shift=None, tol=KERNEL_TOL):
    """Common kernel of several operators sharing a source block (columns = basis)."""
    mats = []
    for k, op in enumerate(ops):
        M = op.matrix if isinstance(op, BlockOperator) else np.asarray(op)
        if shift is not None and shift[k]:
            M = M - shift[k] * np.eye(M.shape[0], M.shape[1])
        mats.append(M)
    n = mats[0].shape[1]
    if n == 0:
        return np.zeros((0, 0))
    A = np.vstack(mats) if sum(m.shape[0] for m in mats) else np.zeros((0, n))
    if A.shape[0] == 0:
        return np.eye(n)
    _, sv, vt = np.linalg.svd(A, full_matrices=True)
    full = np.zeros(n)
    full[: len(sv)] = sv
    scale = max(float(full.max()), 1.0)
    k = kernel_dim_from_singular_values(full, tol=tol, guard=GUARD, scale=scale)
    order = np.argsort(full, kind="stable")
    return vt[order[:k]].T


def nullity(*ops, shift=None, tol=KERNEL_TOL):
    return null_space(*ops, shift=shift, tol=tol).shape[1]


kernelDim = kernel_dim
assembleFirstOrder = assemble_first_order
