"""The round 7-sphere as the naturally reductive space Spin(7)/G2.

so(7) is realized as skew 7x7 matrices acting on the frame of R^7.  The
isotropy algebra g2 is the stabilizer of phi_0 and the complement m is
Lambda^2_7 = {X _| phi_0}, identified with R^7 through m(X) = c * M(X) where
M(X) is the skew matrix of X _| phi_0 and c is fixed by the torsion
calibration T(X, Y) = -(2/3) A(X, Y).

All of this module runs on the exact backend.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exterior as ex
from .clifford import SPIN_DIM, clifford_basis, form_matrix, spin_generators
from .exterior import DIM, endo_extend, interior
from .g2algebra import cross, project2, project3, standard_structure, two_form_to_matrix
from .linalg import exact_nullspace, exact_rank
from .report import CheckReport, residual_check

PAIRS = list(itertools.combinations(range(DIM), 2))


class ConstructionError(RuntimeError):
    """The reductive data could not be built with the expected dimensions."""


def elementary_skew(i, j):
    """E_ij - E_ji: maps e_j to e_i and e_i to -e_j."""
    Z = ex.zeros((DIM, DIM))
    Z[i, j] = Fraction(1)
    Z[j, i] = Fraction(-1)
    return Z


def _flat(Z):
    return np.array([Z[i, j] for i, j in PAIRS], dtype=object)


def _unflat(v):
    Z = ex.zeros((DIM, DIM))
    for c, (i, j) in zip(v, PAIRS):
        Z[i, j] = c
        Z[j, i] = -c
    return Z


def _bracket(a, b):
    return a @ b - b @ a


def _trace_pair(a, b):
    return sum((a * b).ravel(), Fraction(0))


@dataclass(frozen=True)
class ReductiveModel:
    g_basis: tuple
    h_basis: tuple
    m_basis: tuple
    m_factor: Fraction
    metric_scale: Fraction
    bracket_table: np.ndarray  # [g_a, g_b] = sum_c bracket_table[a, b, c] g_c

    def m(self, X):
        """The element m(X) of the complement."""
        return sum((X[i] * self.m_basis[i] for i in range(DIM)), ex.zeros((DIM, DIM)))

    def split(self, Z):
        """(x, Z_h) with Z = m(x) + Z_h; x is a vector in R^7."""
        # the m_basis is orthogonal for the trace form, each of squared length |m_i|^2
        norm = _trace_pair(self.m_basis[0], self.m_basis[0])
        x = np.array([_trace_pair(mi, Z) / norm for mi in self.m_basis], dtype=object)
        return x, Z - self.m(x)

    def bracket_m(self, X, Y):
        return self.split(_bracket(self.m(X), self.m(Y)))[0]

    def bracket_h(self, X, Y):
        return self.split(_bracket(self.m(X), self.m(Y)))[1]


def _so7_table(basis):
    n = len(basis)
    table = np.empty((n, n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            table[a, b] = _flat(_bracket(basis[a], basis[b]))
    return table


@lru_cache(maxsize=1)
def g2_subalgebra():
    """so(7) with the exact stabilizer algebra g2 of phi_0 and uncalibrated m = Lambda^2_7."""
    s = standard_structure(True)
    g_basis = tuple(elementary_skew(i, j) for i, j in PAIRS)
    cols = [endo_extend(Z, s.phi).coeffs for Z in g_basis]
    system = np.stack(cols, axis=1)
    null = exact_nullspace(system)
    if len(null) != 14:
        raise ConstructionError(f"stabilizer of phi_0 has dimension {len(null)}, expected 14")
    h_basis = tuple(_unflat(v) for v in null)
    m_basis = tuple(two_form_to_matrix(interior(ex.unit_vector(i + 1), s.phi)) for i in range(DIM))
    return ReductiveModel(g_basis, h_basis, m_basis, Fraction(1), Fraction(1),
                          _so7_table(g_basis))


def calibrate(model):
    """Rescale m so that [m(X), m(Y)]_m = (2/3) m(A(X, Y)), i.e. torsion -(2/3)A.

    With unscaled brackets [M(X), M(Y)]_m = k M(A(X, Y)), the scale c
    solves c k = 2/3.  The inner product metric_scale * tr(a^T b) is chosen
    to make the calibrated m(e_i) orthonormal.
    """
    s = standard_structure(True)
    e = [ex.unit_vector(i + 1) for i in range(DIM)]
    ratios = set()
    for a, b in PAIRS:
        x = model.bracket_m(e[a], e[b])
        target = cross(e[a], e[b], s)
        k = next(x[i] / target[i] for i in range(DIM) if target[i] != 0)
        if any(x[i] != k * target[i] for i in range(DIM)):
            raise ConstructionError("the m-bracket is not proportional to the cross product")
        ratios.add(k)
    if len(ratios) != 1:
        raise ConstructionError("inconsistent bracket scale across frame pairs")
    # brackets of m = c M scale like c, so the unscaled ratio is the measured one over c
    k = ratios.pop() / model.m_factor
    c = Fraction(2, 3) / k
    m_basis = tuple(M / model.m_factor * c for M in model.m_basis)
    norm = _trace_pair(m_basis[0], m_basis[0])
    if norm <= 0:
        raise ConstructionError("no positive scale achieves the torsion calibration")
    return ReductiveModel(model.g_basis, model.h_basis, m_basis, c, 1 / norm, model.bracket_table)


@lru_cache(maxsize=1)
def round_sphere():
    return calibrate(g2_subalgebra())


# --- curvature ---------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureTensor:
    """R[i, j] is the endomorphism R(e_i, e_j); R[i, j][:, k] = R(e_i, e_j) e_k."""
    R: np.ndarray
    flavor: str

    def component(self, i, j, k, l):
        """g(R(e_i, e_j) e_k, e_l)."""
        return self.R[i, j][l, k]

    def ricci(self):
        """Ric(X, Y) = sum_i g(R(e_i, X) Y, e_i)."""
        out = ex.zeros((DIM, DIM))
        for a in range(DIM):
            for b in range(DIM):
                out[a, b] = sum((self.R[i, a][i, b] for i in range(DIM)), Fraction(0))
        return out


LEVI_CIVITA, CANONICAL = "LeviCivita", "Canonical"


def curvature(model, flavor=CANONICAL):
    """Curvature of the canonical connection (-ad [X,Y]_h) or of Levi-Civita.

    Levi-Civita uses the naturally reductive Nomizu map L(X)Y = 1/2 [X, Y]_m.
    """
    e = [ex.unit_vector(i + 1) for i in range(DIM)]
    brm = [[model.bracket_m(e[i], e[j]) for j in range(DIM)] for i in range(DIM)]
    Rbar = np.empty((DIM, DIM), dtype=object)
    for i in range(DIM):
        for j in range(DIM):
            Rbar[i, j] = -model.bracket_h(e[i], e[j])
    if flavor == CANONICAL:
        return CurvatureTensor(_stack(Rbar), flavor)
    if flavor != LEVI_CIVITA:
        raise ValueError(f"unknown flavor {flavor!r}")
    half = Fraction(1, 2)
    # L[i] is the matrix of Y -> 1/2 [e_i, Y]_m
    L = [np.stack([brm[i][k] * half for k in range(DIM)], axis=1) for i in range(DIM)]
    R = np.empty((DIM, DIM), dtype=object)
    for i in range(DIM):
        for j in range(DIM):
            Lij = sum((brm[i][j][k] * L[k] for k in range(DIM)), ex.zeros((DIM, DIM)))
            R[i, j] = L[i] @ L[j] - L[j] @ L[i] - Lij + Rbar[i, j]
    return CurvatureTensor(_stack(R), flavor)


def _stack(blocks):
    out = np.empty((DIM, DIM, DIM, DIM), dtype=object)
    for i in range(DIM):
        for j in range(DIM):
            out[i, j] = blocks[i, j]
    return out


def vector_generators():
    """Generators for the defining representation: B = sum B[a, b] E_ab."""
    G = np.zeros((DIM, DIM, DIM, DIM), dtype=np.int64)
    for a in range(DIM):
        for b in range(DIM):
            G[a, b, a, b] = 1
    return G, 1


def form_generators(p):
    return ex.endo_generators(p), 1


def spinor_generators():
    return spin_generators(), 4


def q_operator(curv, generators):
    """q(R) = 1/2 sum_ij rep(e_i ^ e_j) rep(R(e_i, e_j)), exactly.

    `generators` is (G, d) with rep(B) = sum_ab B[a, b] G[a, b] / d.  The
    form e_i ^ e_j acts as the skew endomorphism sending e_i to e_j, whose
    matrix is E_ji - E_ij.
    """
    G, dg = generators
    N, dR = ex.to_scaled_int(curv.R)
    K = np.einsum("ijab,abxy->ijxy", N, G)
    E = np.swapaxes(G, 0, 1) - G  # E[i, j] = rep(E_ji - E_ij) * dg
    q = np.einsum("ijxy,ijyz->xz", E, K)
    return ex.from_scaled_int(q, 2 * dg * dg * dR)


def _projector_matrix(fn, p):
    n = len(ex.SUBSETS[p])
    cols = []
    for k in range(n):
        v = ex.zeros(n)
        v[k] = Fraction(1)
        cols.append(fn(ex.Form(p, v)).coeffs)
    return np.stack(cols, axis=1)


def _int_residual(a, b, d):
    """max |a - b| / d for integer arrays, as a Fraction."""
    return Fraction(int(np.abs(a - b).max(initial=0)), d)


def _full_tensor(form):
    """Fully antisymmetric integer array u[i1, ..., ip] of an integral form."""
    p = form.degree
    out = np.zeros((DIM,) * p, dtype=np.int64)
    for idx, c in zip(ex.SUBSETS[p], form.coeffs):
        if c == 0:
            continue
        for perm in itertools.permutations(idx):
            out[perm] = ex.perm_sign(perm) * int(c)
    return out


def curvature_suite(model=None):
    """Exact checks of the curvature identities on the homogeneous model.

    Heavy contractions run on scaled integers, which is exact.
    """
    model = model or round_sphere()
    s = standard_structure(True)
    report = CheckReport()
    Rlc = curvature(model, LEVI_CIVITA)
    Rb = curvature(model, CANONICAL)
    eye = np.eye(DIM, dtype=np.int64)
    T = ex.to_scaled_int(s.cross_table)[0]  # T[a, b] = A(e_a, e_b), integral
    AA = np.einsum("abc,cyz->abyz", T, T)  # A(A(e_a, e_b), e_y)

    Nlc, dlc = ex.to_scaled_int(Rlc.R)
    # R(e_i, e_j) e_k = delta_jk e_i - delta_ik e_j, stored as R[i, j, :, k]
    expected = np.einsum("jk,il->ijlk", eye, eye) - np.einsum("ik,jl->ijlk", eye, eye)
    report.add(residual_check("lc-constant-curvature", "sec-2.4", _int_residual(Nlc, dlc * expected, dlc), 0,
                              "R(X,Y)Z = g(Y,Z)X - g(X,Z)Y"))

    Ric = Rlc.ricci()
    report.add(residual_check("ricci-einstein-6", "sec-2.4", ex.max_abs(Ric - 6 * ex.identity()), 0,
                              f"Ric = {Ric[0, 0]} g"))
    report.add(residual_check("scal-42", "sec-2.3", abs(sum(Ric[i, i] for i in range(DIM)) - 42), 0))
    Ricb = Rb.ricci()
    report.add(residual_check("ricci-canonical-16/3", "sec-2.4",
                              ex.max_abs(Ricb - Fraction(16, 3) * ex.identity()), 0))

    # difference lemma, both forms of the right-hand side (times 9)
    D, dd = ex.to_scaled_int(Rb.R - Rlc.R)
    lhs = 9 * np.transpose(D, (0, 1, 3, 2))  # [w, x, y, :]
    rhs1 = 2 * AA + np.transpose(AA, (2, 0, 1, 3)) + np.transpose(AA, (1, 2, 0, 3))
    rhs2 = 4 * AA - 3 * np.einsum("wy,xz->wxyz", eye, eye) + 3 * np.einsum("xy,wz->wxyz", eye, eye)
    report.add(residual_check("curvature-difference", "lem-2.4", _int_residual(lhs, dd * rhs1, 9 * dd), 0,
                              "cyclic form"))
    report.add(residual_check("curvature-difference-reduced", "lem-2.4", _int_residual(lhs, dd * rhs2, 9 * dd), 0,
                              "reduced form"))

    # first Bianchi identity for the canonical connection (times 3)
    B, db = ex.to_scaled_int(Rb.R)
    Bv = np.transpose(B, (0, 1, 3, 2))  # Bv[w, x, y] = Rbar(e_w, e_x) e_y
    cyc = Bv + np.transpose(Bv, (2, 0, 1, 3)) + np.transpose(Bv, (1, 2, 0, 3))
    P = _full_tensor(s.psi)
    chi_t = 2 * np.transpose(P, (1, 2, 3, 0))  # chi(e_w, e_x, e_y)_z = 2 psi(z, w, x, y)
    report.add(residual_check("bianchi-canonical", "eq-2.11", _int_residual(3 * cyc, 2 * db * chi_t, 3 * db), 0,
                              "cyclic sum = (2/3) chi"))

    # symmetries of R(i, j, k, l) = g(R(e_i, e_j) e_k, e_l)
    worst = Fraction(0)
    for N, d in ((Nlc, dlc), (B, db)):
        C4 = np.transpose(N, (0, 1, 3, 2))
        worst = max(worst, _int_residual(C4, -np.transpose(C4, (1, 0, 2, 3)), d),
                    _int_residual(C4, -np.transpose(C4, (0, 1, 3, 2)), d),
                    _int_residual(C4, np.transpose(C4, (2, 3, 0, 1)), d))
    report.add(residual_check("curvature-symmetries", "sec-2.4", worst, 0, "both connections"))

    # the canonical connection is G2: each Rbar(X, Y) kills phi
    G3 = ex.endo_generators(3)
    phi_int = ex.to_scaled_int(s.phi.coeffs)[0]
    killed = np.einsum("ijab,abxy,y->ijx", B, G3, phi_int)
    report.add(residual_check("canonical-curvature-in-g2", "sec-2.4", Fraction(int(np.abs(killed).max()), db), 0))

    # curvature endomorphisms
    qT = q_operator(Rlc, vector_generators())
    qTb = q_operator(Rb, vector_generators())
    report.add(residual_check("q-tangent-lc", "sec-2.4", ex.max_abs(qT - 6 * ex.identity()), 0, "q_T(R) = 6"))
    report.add(residual_check("q-tangent-canonical", "sec-2.4",
                              ex.max_abs(qTb - Fraction(16, 3) * ex.identity()), 0, "q_T(Rbar) = 16/3"))
    psi_dot = form_matrix(s.psi)
    ident8 = ex.identity(True, SPIN_DIM)
    qS = q_operator(Rb, spinor_generators())
    report.add(residual_check("q-spinor-canonical", "sec-3",
                              ex.max_abs(qS - (Fraction(14, 3) * ident8 - Fraction(2, 3) * psi_dot)),
                              0, "q_S(Rbar) = 14/3 - (2/3) psi"))

    C = clifford_basis(True)
    Cint = ex.to_scaled_int(C)[0]
    RS = np.einsum("ijlk,lkac->ijac", B, spin_generators())  # 4 db * Rbar_S(e_i, e_j)
    ric_int = ex.to_scaled_int(Ricb)
    lhs = np.einsum("jab,xjbc->xac", Cint, RS)  # times 4 db
    psi_x = np.stack([ex.to_scaled_int(form_matrix(interior(ex.unit_vector(x + 1), s.psi)))[0]
                      for x in range(DIM)])
    # right side -1/2 Ricbar(e_x) . - 2/3 (e_x _| psi). with common denominators cleared
    Nric, dric = ric_int
    rhs_scaled = -3 * np.einsum("yx,yac->xac", Nric, Cint) * 4 * db - 4 * dric * psi_x * 4 * db
    report.add(residual_check("spinor-curvature-contraction", "eq-3.2",
                              _int_residual(6 * dric * lhs, rhs_scaled, 6 * dric * 4 * db), 0))
    lhs = np.einsum("iab,jbc,ijcd->ad", Cint, Cint, RS)
    psi_int = ex.to_scaled_int(psi_dot)[0]
    rhs = 4 * db * (56 * np.eye(SPIN_DIM, dtype=np.int64) - 8 * psi_int)
    report.add(residual_check("spinor-curvature-double-contraction", "eq-3.3",
                              _int_residual(3 * lhs, rhs, 3 * 4 * db), 0, "56/3 - (8/3) psi"))

    # q(Rbar) preserves the G2 splittings of forms
    q2 = q_operator(Rb, form_generators(2))
    q3 = q_operator(Rb, form_generators(3))
    P7 = _projector_matrix(lambda b: project2(b, s)[0], 2)
    P27 = _projector_matrix(lambda a: project3(a, s)[2], 3)
    P37 = _projector_matrix(lambda a: project3(a, s)[1], 3)
    mm = ex.exact_matmul
    worst = max(ex.max_abs(mm(q2, P7) - mm(P7, q2)), ex.max_abs(mm(q3, P27) - mm(P27, q3)),
                ex.max_abs(mm(q3, P37) - mm(P37, q3)))
    report.add(residual_check("q-canonical-preserves-g2-splitting", "sec-2.4", worst, 0,
                              "commutes with the Lambda^2_7, Lambda^3_7, Lambda^3_27 projectors"))
    return report


def model_checks(model=None):
    """Structural checks on the reductive split itself."""
    model = model or round_sphere()
    s = standard_structure(True)
    report = CheckReport()
    h_flat = np.stack([_flat(h) for h in model.h_basis], axis=1)
    rank_h = exact_rank(h_flat.T)
    report.add(residual_check("g2-dimension", "sec-2.2", abs(rank_h - 14), 0, f"dim = {rank_h}"))
    worst = Fraction(0)
    for a in model.h_basis:
        for b in model.h_basis:
            x, _ = model.split(_bracket(a, b))
            worst = max(worst, ex.max_abs(x))
    report.add(residual_check("g2-closed", "sec-2.2", worst, 0, "[h, h] in h"))
    worst = Fraction(0)
    e = [ex.unit_vector(i + 1) for i in range(DIM)]
    for h in model.h_basis:
        for i in range(DIM):
            # [h, m(X)] = m(hX)
            worst = max(worst, ex.max_abs(_bracket(h, model.m(e[i])) - model.m(h @ e[i])))
    report.add(residual_check("m-equivariant", "sec-2.3", worst, 0, "[h, m(X)] = m(hX)"))
    worst = max(ex.max_abs(model.bracket_m(e[i], e[j]) - Fraction(2, 3) * cross(e[i], e[j], s))
                for i in range(DIM) for j in range(DIM))
    report.add(residual_check("torsion-calibration", "eq-2.3", worst, 0, "[X, Y]_m = (2/3) A(X, Y)"))
    G = np.array([[_trace_pair(a, b) * model.metric_scale for b in model.m_basis] for a in model.m_basis],
                 dtype=object)
    report.add(residual_check("m-orthonormal", "sec-2.2", ex.max_abs(G - ex.identity()), 0))
    return report


g2Subalgebra = g2_subalgebra
curvatureSuite = curvature_suite
