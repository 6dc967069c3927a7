"""The G2-structure on R^7: phi_0, psi_0, cross product, projectors, i and j.

Vectors are length-7 numpy arrays and endomorphisms are 7x7 arrays, on
either scalar backend (see ``exterior``).  Matrix convention for an
endomorphism B: column b holds B(e_b).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exterior as ex
from .exterior import DIM, Form, endo_extend, form_inner, hodge, interior, wedge
from .report import CheckReport, residual_check

PHI_TERMS = [(1, (1, 2, 3)), (1, (1, 7, 6)), (1, (2, 5, 7)), (1, (6, 5, 3)),
             (1, (1, 4, 5)), (1, (2, 4, 6)), (1, (3, 4, 7))]
PSI_TERMS = [(1, (4, 5, 6, 7)), (-1, (2, 3, 4, 5)), (1, (1, 3, 4, 6)), (-1, (1, 2, 4, 7)),
             (1, (2, 3, 6, 7)), (1, (1, 3, 5, 7)), (1, (1, 2, 5, 6))]


class DegenerateStructureError(ValueError):
    """The 3-form does not define a positive-definite metric."""


@dataclass(frozen=True)
class G2Structure:
    phi: Form
    psi: Form
    tau0: object
    cross_table: np.ndarray  # cross_table[a, b] = A(e_a, e_b)

    @property
    def exact(self):
        return self.phi.exact

    def cross_endo(self, X):
        """A_X as a matrix: column b is A(X, e_b)."""
        X = np.asarray(X)
        if ex.is_exact(X) and self.exact:
            flat = ex.exact_matmul(X.reshape(1, DIM), self.cross_table.reshape(DIM, DIM * DIM))
            return flat.reshape(DIM, DIM).T
        return np.tensordot(X, self.cross_table, axes=(0, 0)).T

    def vol(self):
        return ex.volume_form(self.exact)


def phi0(exact_backend=True):
    return Form.from_terms(3, PHI_TERMS, exact_backend)


def psi0(exact_backend=True):
    return Form.from_terms(4, PSI_TERMS, exact_backend)


def _cross_table(phi):
    exact_backend = phi.exact
    table = ex.zeros((DIM, DIM, DIM), exact_backend)
    units = [ex.unit_vector(i + 1, exact_backend) for i in range(DIM)]
    for a in range(DIM):
        ia = interior(units[a], phi)
        for b in range(DIM):
            iab = interior(units[b], ia)
            # g(e_x, A(e_a, e_b)) = phi(e_x, e_a, e_b) = phi(e_a, e_b, e_x)
            table[a, b] = iab.coeffs
    return table


@lru_cache(maxsize=2)
def standard_structure(exact_backend=True):
    """The flat model structure with tau0 = 4."""
    phi = phi0(exact_backend)
    psi = hodge(phi)
    tau0 = Fraction(4) if exact_backend else 4.0
    table = _cross_table(phi)
    table.setflags(write=False)
    return G2Structure(phi, psi, tau0, table)


def metric_from_phi(phi):
    """Metric g determined by (X _| phi) ^ (Y _| phi) ^ phi = -6 g(X, Y) vol_g.

    Writing the left side as B(X, Y) e^{1..7} and vol_g = sqrt(det g) e^{1..7},
    the matrix K = -B/6 equals g sqrt(det g), so g = K / det(K)^(1/9).
    """
    if phi.degree != 3:
        raise ValueError("metric_from_phi needs a 3-form")
    exact_backend = phi.exact
    units = [ex.unit_vector(i + 1, exact_backend) for i in range(DIM)]
    contractions = [interior(u, phi) for u in units]
    K = ex.zeros((DIM, DIM), exact_backend)
    for a in range(DIM):
        for b in range(a, DIM):
            top = wedge(wedge(contractions[a], contractions[b]), phi).coeffs[0]
            K[a, b] = K[b, a] = -top / 6
    Kf = ex.to_float(K)
    if not np.allclose(Kf, Kf.T) or np.linalg.eigvalsh(Kf).min() <= 0:
        raise DegenerateStructureError("3-form does not induce a positive-definite metric")
    if exact_backend:
        det = _exact_det(K)
        root = _exact_root(det, 9)
        if root is not None:
            return K * (1 / root)
    det = np.linalg.det(Kf)
    return Kf / det ** (1.0 / 9.0)


def _exact_det(M):
    M = [list(row) for row in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def _int_root(n, k):
    if n < 0:
        return None
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _exact_root(q, k):
    q = Fraction(q)
    num, den = _int_root(q.numerator, k), _int_root(q.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def cross(X, Y, structure=None):
    """A(X, Y), defined by g(Z, A(X, Y)) = phi(Z, X, Y)."""
    s = structure or standard_structure(ex.is_exact(np.asarray(X)))
    X, Y = np.asarray(X), np.asarray(Y)
    return np.tensordot(np.tensordot(X, s.cross_table, axes=(0, 0)), Y, axes=(0, 0))


def chi(Y, Z, W, structure=None):
    """chi(Y, Z, W), defined by g(X, chi(Y, Z, W)) / 2 = psi(X, Y, Z, W)."""
    s = structure or standard_structure(ex.is_exact(np.asarray(Y)))
    # psi(X, Y, Z, W) = (W _| Z _| Y _| psi)(X) up to moving X to the front:
    # psi(X, Y, Z, W) = -psi(Y, X, Z, W) = psi(Y, Z, X, W) = -psi(Y, Z, W, X)
    v = interior(W, interior(Z, interior(Y, s.psi))).coeffs
    return -2 * v


def project2(beta, structure=None):
    """Split a 2-form into its Lambda^2_7 and Lambda^2_14 parts.

    The map L(b) = *(phi ^ b) has eigenvalue -2 on Lambda^2_7 and +1 on
    Lambda^2_14, so p7 = (b - L b)/3 and p14 = (2b + L b)/3.
    """
    if beta.degree != 2:
        raise ValueError("project2 needs a 2-form")
    s = structure or standard_structure(beta.exact)
    L = hodge(wedge(s.phi, beta))
    third = Fraction(1, 3) if (beta.exact and s.exact) else 1.0 / 3.0
    p7 = (beta - L) * third
    p14 = (beta * 2 + L) * third
    return p7, p14


def _lambda37_basis(s):
    return [interior(ex.unit_vector(i + 1, s.exact), s.psi) for i in range(DIM)]


def _gram_project(alpha, basis):
    """Orthogonal projection of alpha onto span(basis) via the Gram matrix."""
    exact_backend = alpha.exact and all(b.exact for b in basis)
    G = ex.zeros((len(basis), len(basis)), exact_backend)
    rhs = ex.zeros(len(basis), exact_backend)
    for i, b in enumerate(basis):
        rhs[i] = form_inner(b, alpha)
        for j, c in enumerate(basis):
            G[i, j] = form_inner(b, c)
    coeffs = _solve(G, rhs)
    out = Form.zero(alpha.degree, exact_backend)
    for c, b in zip(coeffs, basis):
        if c != 0:
            out = out + b * c
    return out


def _solve(G, rhs):
    if not ex.is_exact(G):
        return np.linalg.solve(ex.to_float(G), ex.to_float(rhs))
    n = len(rhs)
    M = [list(G[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        pivot = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[pivot] = M[pivot], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def project3(alpha, structure=None):
    """Split a 3-form into its Lambda^3_1, Lambda^3_7 and Lambda^3_27 parts."""
    if alpha.degree != 3:
        raise ValueError("project3 needs a 3-form")
    s = structure or standard_structure(alpha.exact)
    p1 = _gram_project(alpha, [s.phi])
    p7 = _gram_project(alpha, _lambda37_basis(s))
    p27 = alpha - p1 - p7
    return p1, p7, p27


def _is_zero(arr, exact_backend, tol=1e-10):
    if exact_backend:
        return all(v == 0 for v in np.asarray(arr).ravel())
    return np.max(np.abs(ex.to_float(arr))) <= tol


def imap(H, structure=None):
    """i(H) = -2 H_* phi for symmetric trace-free H."""
    H = np.asarray(H)
    exact_backend = ex.is_exact(H)
    sym0, skew, tr = ex.endo_split(H)
    if not _is_zero(skew, exact_backend) or not _is_zero(np.array([tr], dtype=H.dtype), exact_backend):
        raise ValueError("imap is defined on symmetric trace-free endomorphisms only")
    return imap_any(H, structure)


def imap_any(B, structure=None):
    """-2 B_* phi for an arbitrary endomorphism (no membership check)."""
    B = np.asarray(B)
    s = structure or standard_structure(ex.is_exact(B))
    return endo_extend(B, s.phi) * -2


def jmap(gamma, structure=None):
    """j(gamma)(X, Y) = *((X _| phi) ^ (Y _| phi) ^ gamma)."""
    if gamma.degree != 3:
        raise ValueError("jmap needs a 3-form")
    s = structure or standard_structure(gamma.exact)
    exact_backend = gamma.exact and s.exact
    contractions = [interior(ex.unit_vector(i + 1, exact_backend), s.phi) for i in range(DIM)]
    out = ex.zeros((DIM, DIM), exact_backend)
    for a in range(DIM):
        for b in range(DIM):
            out[a, b] = wedge(wedge(contractions[a], contractions[b]), gamma).coeffs[0]
    return out


def cross_extend(X, t, structure=None):
    """A_{X*} on a 2-tensor t = sum t_ab e_a (x) e_b: A_X t + t A_X^T."""
    t = np.asarray(t)
    s = structure or standard_structure(ex.is_exact(t))
    AX = s.cross_endo(X)
    if ex.is_exact(t):
        return ex.exact_matmul(AX, t) + ex.exact_matmul(t, AX.T)
    return AX @ t + t @ AX.T


def tilde_extend(X, t, structure=None):
    """Twisted extension: alpha (x) beta -> A_X alpha (x) beta - alpha (x) A_X beta."""
    t = np.asarray(t)
    s = structure or standard_structure(ex.is_exact(t))
    AX = s.cross_endo(X)
    if ex.is_exact(t):
        return ex.exact_matmul(AX, t) - ex.exact_matmul(t, AX.T)
    return AX @ t - t @ AX.T


def two_form_to_matrix(beta):
    """Skew matrix t with beta = sum_{a<b} t_ab e^{ab} = sum_{a,b} t_ab e_a (x) e_b."""
    exact_backend = beta.exact
    t = ex.zeros((DIM, DIM), exact_backend)
    for (a, b), c in zip(ex.SUBSETS[2], beta.coeffs):
        t[a, b] = c
        t[b, a] = -c
    return t


def matrix_to_two_form(t):
    """2-form of the skew part of a 2-tensor (the inverse of two_form_to_matrix)."""
    t = np.asarray(t)
    half = Fraction(1, 2) if ex.is_exact(t) else 0.5
    coeffs = ex.zeros(len(ex.SUBSETS[2]), ex.is_exact(t))
    for k, (a, b) in enumerate(ex.SUBSETS[2]):
        coeffs[k] = (t[a, b] - t[b, a]) * half
    return Form(2, coeffs)


# --- random inputs for the suites ------------------------------------------

def random_vector(rng, exact_backend=True):
    v = rng.integers(-9, 10, size=DIM)
    return ex.exact(v) if exact_backend else v.astype(float)


def random_form(rng, degree, exact_backend=True):
    from math import comb
    c = rng.integers(-9, 10, size=comb(DIM, degree))
    return Form(degree, ex.exact(c) if exact_backend else c.astype(float))


def random_endo(rng, exact_backend=True):
    B = rng.integers(-9, 10, size=(DIM, DIM))
    return ex.exact(B) if exact_backend else B.astype(float)


def random_sym0(rng, exact_backend=True):
    return ex.endo_split(random_endo(rng, exact_backend))[0]


def random_w14(rng, structure):
    return project2(random_form(rng, 2, structure.exact), structure)[1]


def random_gamma27(rng, structure):
    return project3(random_form(rng, 3, structure.exact), structure)[2]


# --- identity suite --------------------------------------------------------

def _vec_res(a, b):
    return ex.max_abs(np.asarray(a) - np.asarray(b))


def _form_res(u, v):
    return ex.max_abs((u - v).coeffs)


def _identity_cases(s):
    """(name, anchor, residual function of an rng) for each pointwise identity."""
    exb = s.exact
    one = Fraction(1) if exb else 1.0
    half = one / 2
    e = [ex.unit_vector(i + 1, exb) for i in range(DIM)]

    def g(X, Y):
        return sum((x * y for x, y in zip(X, Y)), 0 * one)

    def cross_square_case(rng):
        X, Y, Z = (random_vector(rng, exb) for _ in range(3))
        lhs = cross(X, cross(Y, Z, s), s)
        rhs = -g(X, Y) * Z + g(X, Z) * Y - half * chi(X, Y, Z, s)
        return _vec_res(lhs, rhs)

    def cross_cyclic_case(rng):
        X, Y, Z = (random_vector(rng, exb) for _ in range(3))
        lhs = 2 * cross(cross(X, Y, s), Z, s)
        rhs = (cross(cross(Y, Z, s), X, s) + cross(cross(Z, X, s), Y, s)
               + 3 * g(X, Z) * Y - 3 * g(Y, Z) * X)
        return _vec_res(lhs, rhs)

    def double_contraction_case(rng):
        X, Y = random_vector(rng, exb), random_vector(rng, exb)
        v = interior(X, interior(Y, s.phi)).coeffs
        lhs = interior(v, s.phi) + interior(X, interior(Y, s.psi))
        rhs = -wedge(Form(1, X), Form(1, Y))
        return _form_res(lhs, rhs)

    def phi_wedge_case(rng):
        X, Y = random_vector(rng, exb), random_vector(rng, exb)
        lhs = wedge(wedge(s.phi, Form(1, X)), Form(1, Y))
        rhs = hodge(interior(Y, interior(X, s.psi)))
        return _form_res(lhs, rhs)

    def sym_phi(rng):
        H = random_sym0(rng, exb)
        r1 = _form_res(hodge(endo_extend(H, s.phi)), -endo_extend(H, s.psi))
        r2 = _form_res(hodge(endo_extend(H, s.psi)), -endo_extend(H, s.phi))
        return max(r1, r2)

    def cross_phi(rng):
        X = random_vector(rng, exb)
        AX = s.cross_endo(X)
        r1 = _form_res(endo_extend(AX, s.phi), interior(X, s.psi) * 3)
        r2 = _form_res(endo_extend(AX, s.psi), wedge(Form(1, X), s.phi) * -3)
        return max(r1, r2)

    def w_phi(rng):
        w = random_w14(rng, s)
        return ex.max_abs(endo_extend(two_form_to_matrix(w), s.phi).coeffs)

    def schur_w_wedge(rng):
        w = random_w14(rng, s)
        W = two_form_to_matrix(w)
        total = Form.zero(3, exb)
        for i in range(DIM):
            total = total + wedge(Form(1, e[i]), matrix_to_two_form(cross_extend(e[i], W, s)))
        return ex.max_abs(total.coeffs)

    def schur_w_interior(rng):
        w = random_w14(rng, s)
        W = two_form_to_matrix(w)
        total = Form.zero(1, exb)
        for i in range(DIM):
            total = total + interior(e[i], matrix_to_two_form(cross_extend(e[i], W, s)))
        return ex.max_abs(total.coeffs)

    def schur_h(rng):
        H = random_sym0(rng, exb)
        total = ex.zeros(DIM, exb)
        for i in range(DIM):
            AH = cross_extend(e[i], H, s)  # as an endomorphism: [A_{e_i}, H]
            total = total + AH @ e[i]
        return ex.max_abs(total)

    def schur_gamma(rng):
        gamma = random_gamma27(rng, s)
        total = Form.zero(2, exb)
        for i in range(DIM):
            total = total + interior(e[i], endo_extend(s.cross_endo(e[i]), gamma))
        return ex.max_abs(total.coeffs)

    return [
        ("cross-square", "eq-2.6", cross_square_case),
        ("cross-cyclic", "eq-2.7", cross_cyclic_case),
        ("double-contraction", "eq-2.8", double_contraction_case),
        ("phi-wedge-vectors", "eq-2.9", phi_wedge_case),
        ("sym0-on-phi-psi", "eq-2.13", sym_phi),
        ("cross-on-phi-psi", "eq-2.14", cross_phi),
        ("lambda2-14-kills-phi", "eq-2.15", w_phi),
        ("schur-w-wedge", "eq-2.16", schur_w_wedge),
        ("schur-w-interior", "eq-2.17", schur_w_interior),
        ("schur-sym0", "eq-2.18", schur_h),
        ("schur-gamma", "eq-2.19", schur_gamma),
    ]


def identity_suite(seed=0, trials=100, exact_backend=True, tol=1e-10):
    """Evaluate every pointwise identity on `trials` random inputs each."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    s = standard_structure(exact_backend)
    report = CheckReport()
    for k, (name, anchor, fn) in enumerate(_identity_cases(s)):
        rng = np.random.default_rng([seed, k])
        worst = Fraction(0) if exact_backend else 0.0
        for _ in range(trials):
            worst = max(worst, fn(rng))
        report.add(residual_check(name, anchor, worst, 0 if exact_backend else tol,
                                  f"{trials} trials, {'exact' if exact_backend else 'float'}"))
    return report


def _sym0_basis():
    """27 integer matrices spanning the symmetric trace-free endomorphisms."""
    out = []
    for a in range(DIM):
        for b in range(a + 1, DIM):
            E = ex.zeros((DIM, DIM), True)
            E[a, b] = E[b, a] = Fraction(1)
            out.append(E)
    for a in range(DIM - 1):
        E = ex.zeros((DIM, DIM), True)
        E[a, a], E[a + 1, a + 1] = Fraction(1), Fraction(-1)
        out.append(E)
    return out


def invariant_checks():
    """Exact structural invariants of phi_0, psi_0 and the maps i, j."""
    from .linalg import exact_nullspace, exact_rank

    s = standard_structure(True)
    report = CheckReport()
    target = psi0(True)
    mismatched = [idx for idx in set(s.psi.terms()) | set(target.terms()) if s.psi[idx] != target[idx]]
    report.add(residual_check("hodge-phi-is-psi", "sec-2.2-phi0", Fraction(len(mismatched)), 0,
                              "coefficients of *phi_0 against the psi_0 monomial list"))
    top = wedge(s.phi, s.psi)
    report.add(residual_check("phi-wedge-psi-is-7vol", "sec-2.2-phi0", ex.max_abs((top - s.vol() * 7).coeffs), 0,
                              f"phi_0 ^ psi_0 = {top.coeffs[0]} vol"))
    report.add(residual_check("metric-from-phi0", "sec-2.2-metric", ex.max_abs(metric_from_phi(s.phi) - ex.identity(True)),
                              0, "(X _| phi)^(Y _| phi)^phi = -6 g(X,Y) vol gives g = Id"))
    worst = Fraction(0)
    images = []
    for H in _sym0_basis():
        g = imap(H, s)
        images.append(g.coeffs)
        worst = max(worst, ex.max_abs(jmap(g, s) + H * 8))
    report.add(residual_check("j-after-i-is-minus-8", "sec-2.3-ij", worst, 0, "on a basis of Sym0"))
    in_kernel = max(max(ex.max_abs(wedge(Form(3, c), s.phi).coeffs), ex.max_abs(wedge(Form(3, c), s.psi).coeffs))
                    for c in images)
    report.add(residual_check("i-lands-in-lambda3-27", "sec-2.3-ij", in_kernel, 0, "i(H) ^ phi = i(H) ^ psi = 0"))
    rank = exact_rank(np.array(images, dtype=object))
    constraints = np.concatenate([ex.exact(ex.wedge_matrix(s.phi, 3).astype(int)),
                                  ex.exact(ex.wedge_matrix(s.psi, 3).astype(int))])
    kernel = len(exact_nullspace(constraints))
    report.add(residual_check("i-image-is-lambda3-27", "sec-2.3-ij", Fraction(abs(rank - 27) + abs(kernel - 27)), 0,
                              f"rank i = {rank}, dim ker(^phi) n ker(^psi) = {kernel}"))
    return report


standardStructure = standard_structure
metricFromPhi = metric_from_phi
tildeExtend = tilde_extend
identitySuite = identity_suite
