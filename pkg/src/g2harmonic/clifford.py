"""Spinors on R^7 modelled as Lambda^0 + Lambda^1 via the Killing spinor kappa_0.

A spinor zeta = f kappa_0 + alpha . kappa_0 is stored as the length-8 array
(f, alpha_1..alpha_7).  A spinor-valued 1-form sum_i alpha^(i) (x) e_i is an
8x7 array whose column i is the spinor alpha^(i).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exterior as ex
from .exterior import DIM
from .g2algebra import matrix_to_two_form, project2, standard_structure

SPIN_DIM = 8


def spinor(f, alpha):
    """Pack (f, alpha) into a spinor array."""
    alpha = np.asarray(alpha)
    out = ex.zeros(SPIN_DIM, ex.is_exact(alpha))
    out[0] = f
    out[1:] = alpha
    return out


def spinor_parts(s):
    s = np.asarray(s)
    return s[0], s[1:]


def kappa0(exact_backend=True):
    s = ex.zeros(SPIN_DIM, exact_backend)
    s[0] = Fraction(1) if exact_backend else 1.0
    return s


def clifford_matrix(Y, structure=None):
    """Matrix of zeta -> Y . zeta, with Y.(f, a) = (-g(Y, a), f Y + A_Y a)."""
    Y = np.asarray(Y)
    s = structure or standard_structure(ex.is_exact(Y))
    M = ex.zeros((SPIN_DIM, SPIN_DIM), ex.is_exact(Y))
    M[0, 1:] = -Y
    M[1:, 0] = Y
    M[1:, 1:] = s.cross_endo(Y)
    return M


@lru_cache(maxsize=2)
def clifford_basis(exact_backend=True):
    """Stack of the 8x8 matrices of e_1, ..., e_7 (read-only)."""
    C = np.array([clifford_matrix(ex.unit_vector(i + 1, exact_backend)) for i in range(DIM)])
    C.setflags(write=False)
    return C


def clifford_vector(Y, s, structure=None):
    return clifford_matrix(Y, structure) @ np.asarray(s)


def form_matrix(u):
    """Matrix of the Clifford action of a form.

    e^{i1..ip} with i1 < ... < ip acts as e_{i1} . ( ... (e_{ip} . zeta)).
    """
    C = clifford_basis(u.exact)
    M = ex.zeros((SPIN_DIM, SPIN_DIM), u.exact)
    if u.degree == 0:
        return ex.identity(u.exact, SPIN_DIM) * u.coeffs[0]
    for idx, c in zip(ex.SUBSETS[u.degree], u.coeffs):
        if c == 0:
            continue
        P = C[idx[0]]
        for k in idx[1:]:
            P = P @ C[k]
        M = M + c * P
    return M


def clifford_form(u, s):
    return form_matrix(u) @ np.asarray(s)


@lru_cache(maxsize=1)
def spin_generators():
    """Integer tensor S with spin_lift(B) = 1/4 sum_{l,k} B[l, k] S[l, k]; S[l, k] = e_k e_l."""
    C = clifford_basis(False).astype(np.int64)
    S = np.einsum("kab,lbc->lkac", C, C)
    S.setflags(write=False)
    return S


def spin_lift(B):
    """Spin representation of a skew endomorphism: 1/4 sum B_lk e_k e_l.

    Satisfies [spin_lift(B), c(X)] = c(BX).
    """
    B = np.asarray(B)
    S = spin_generators()
    if ex.is_exact(B):
        N, d = ex.to_scaled_int(B)
        return ex.from_scaled_int(np.einsum("lk,lkac->ac", N, S), 4 * d)
    return np.einsum("lk,lkac->ac", B, S) / 4.0


# --- spinor-valued 1-forms --------------------------------------------------

def contraction(t):
    """Clifford contraction sum_i e_i . alpha^(i)."""
    t = np.asarray(t)
    C = clifford_basis(ex.is_exact(t))
    return sum((C[i] @ t[:, i] for i in range(DIM)), ex.zeros(SPIN_DIM, ex.is_exact(t)))


def embed_spinor(kappa):
    """iota(kappa) = -1/7 sum_i e_i . kappa (x) e_i; a right inverse of contraction."""
    kappa = np.asarray(kappa)
    C = clifford_basis(ex.is_exact(kappa))
    seventh = Fraction(1, 7) if ex.is_exact(kappa) else 1.0 / 7.0
    return np.stack([-(C[i] @ kappa) * seventh for i in range(DIM)], axis=1)


def s32_project(t):
    """Orthogonal projection of S (x) T onto the kernel of Clifford contraction."""
    return np.asarray(t) - embed_spinor(contraction(t))


@lru_cache(maxsize=2)
def s32_projector_matrix(exact_backend=False):
    """56x56 matrix of s32_project on row-major flattened 8x7 arrays."""
    n = SPIN_DIM * DIM
    P = ex.zeros((n, n), exact_backend)
    for k in range(n):
        t = ex.zeros(n, exact_backend)
        t[k] = 1
        P[:, k] = s32_project(t.reshape(SPIN_DIM, DIM)).ravel()
    P.setflags(write=False)
    return P


def psi_from_endo(H, base=None):
    """Psi^(H, base): column i is H(e_i) . base."""
    H = np.asarray(H)
    exb = ex.is_exact(H)
    base = kappa0(exb) if base is None else np.asarray(base)
    C = clifford_basis(exb)
    cols = [np.tensordot(H[:, i], C, axes=(0, 0)) @ base for i in range(DIM)]
    return np.stack(cols, axis=1)


def decompose_spin_tensor(t):
    """Split S (x) T into Lambda^1 + Lambda^2_7 + Lambda^2_14 + Sym_0 + trace line.

    Returns (lambda1, w7, w14, H, trace) with lambda1 = sum alpha_0^(i) e_i and
    the Lambda^1-block sum alpha_1^(i) (x) e_i split as a 2-tensor.
    """
    t = np.asarray(t)
    lambda1 = t[0, :].copy()
    T = t[1:, :]
    sym0, skew, trace = ex.endo_split(T)
    w7, w14 = project2(matrix_to_two_form(skew))
    return lambda1, w7, w14, sym0, trace


def recompose_spin_tensor(lambda1, w7, w14, H, trace):
    from .g2algebra import two_form_to_matrix
    exb = ex.is_exact(np.asarray(H))
    t = ex.zeros((SPIN_DIM, DIM), exb)
    seventh = Fraction(1, 7) if exb else 1.0 / 7.0
    t[0, :] = lambda1
    t[1:, :] = H + two_form_to_matrix(w7 + w14) + ex.identity(exb) * (trace * seventh)
    return t


cliffordVector = clifford_vector
cliffordForm = clifford_form
decomposeSpinTensor = decompose_spin_tensor
s32Project = s32_project
psiFromEndo = psi_from_endo
