from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from g2harmonic import clifford as cl
from g2harmonic import exterior as ex
from g2harmonic.exterior import Form, form_inner
from g2harmonic.g2algebra import phi0, psi0, standard_structure
from g2harmonic.homogeneous import round_sphere

S = standard_structure(True)
ints = st.integers(-9, 9)
vectors = st.lists(ints, min_size=7, max_size=7).map(ex.exact)
spinors = st.lists(ints, min_size=8, max_size=8).map(ex.exact)
spin_tensors = st.lists(ints, min_size=56, max_size=56).map(lambda c: ex.exact(np.array(c).reshape(8, 7)))
sym0s = st.lists(ints, min_size=49, max_size=49).map(lambda c: ex.endo_split(ex.exact(np.array(c).reshape(7, 7)))[0])


def e(i):
    return ex.unit_vector(i)


def sp(f, alpha):
    return cl.spinor(Fraction(f), ex.exact(list(alpha)))


ZERO = [0] * 7


def same(a, b):
    return ex.max_abs(np.asarray(a) - np.asarray(b)) == 0


# --- Clifford action of vectors -------------------------------------------------

def test_e1_on_kappa0():
    assert same(cl.clifford_vector(e(1), cl.kappa0()), sp(0, e(1)))


def test_e1_on_e1():
    assert same(cl.clifford_vector(e(1), sp(0, e(1))), sp(-1, ZERO))


def test_e1_on_e2():
    assert same(cl.clifford_vector(e(1), sp(0, e(2))), sp(0, e(3)))


@given(vectors, vectors, spinors)
def test_clifford_relation(X, Y, s):
    lhs = cl.clifford_vector(X, cl.clifford_vector(Y, s)) + cl.clifford_vector(Y, cl.clifford_vector(X, s))
    assert same(lhs, -2 * sum(X * Y) * s)


# --- forms --------------------------------------------------------------------

def test_e12_on_kappa0():
    assert same(cl.clifford_form(Form.monomial((1, 2)), cl.kappa0()), sp(0, e(3)))


@given(vectors)
def test_phi_on_one_form_part(alpha):
    assert same(cl.clifford_form(phi0(), cl.spinor(Fraction(0), alpha)), cl.spinor(Fraction(0), alpha))


def test_phi_on_kappa0_regression_constant():
    # not stated explicitly; recorded as computed
    assert same(cl.clifford_form(phi0(), cl.kappa0()), -7 * cl.kappa0())


def test_phi_eigenvalue_pattern():
    vals = np.round(np.linalg.eigvals(ex.to_float(cl.form_matrix(phi0()))).real, 9)
    assert sorted(vals) == [-7.0] + [1.0] * 7


def test_psi_on_kappa0():
    assert same(cl.clifford_form(psi0(), cl.kappa0()), 7 * cl.kappa0())


@given(vectors)
def test_psi_on_one_form_part(alpha):
    s = cl.spinor(Fraction(0), alpha)
    assert same(cl.clifford_form(psi0(), s), -s)


def test_volume_element_is_central_scalar():
    # regression constant: vol acts as -1
    assert same(cl.form_matrix(ex.volume_form()), -ex.identity(True, 8))


def test_function_acts_by_multiplication():
    assert same(cl.form_matrix(Form(0, ex.exact([3]))), 3 * ex.identity(True, 8))


def test_spin_lift_intertwines_clifford_action():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((7, 7))
    B = B - B.T
    X = rng.standard_normal(7)
    L = cl.spin_lift(B)
    lhs = L @ cl.clifford_matrix(X, standard_structure(False)) - cl.clifford_matrix(X, standard_structure(False)) @ L
    assert np.allclose(lhs, cl.clifford_matrix(B @ X, standard_structure(False)))


# --- decomposition of spinor-valued 1-forms ----------------------------------------

def test_decompose_kappa0_part_only():
    t = ex.zeros((8, 7))
    t[0, 0] = Fraction(1)
    lam, w7, w14, H, tr = cl.decompose_spin_tensor(t)
    assert same(lam, e(1)) and w7.is_zero() and w14.is_zero() and ex.max_abs(H) == 0 and tr == 0


@given(sym0s)
def test_decompose_psi_of_sym0(H):
    lam, w7, w14, H2, tr = cl.decompose_spin_tensor(cl.psi_from_endo(H))
    assert ex.max_abs(lam) == 0 and w7.is_zero() and w14.is_zero() and same(H2, H) and tr == 0


def test_decompose_trace_line():
    t = ex.zeros((8, 7))
    t[1:, :] = ex.identity()
    lam, w7, w14, H, tr = cl.decompose_spin_tensor(t)
    assert tr == 7 and ex.max_abs(H) == 0 and w7.is_zero() and w14.is_zero() and ex.max_abs(lam) == 0


@given(spin_tensors)
def test_decompose_recomposes_and_is_isometric(t):
    parts = cl.decompose_spin_tensor(t)
    assert same(cl.recompose_spin_tensor(*parts), t)
    lam, w7, w14, H, tr = parts
    # component-wise constants: 1, 2, 2, 1, 1/7
    norm = (sum(lam * lam) + 2 * form_inner(w7, w7) + 2 * form_inner(w14, w14)
            + sum((H * H).ravel()) + tr * tr / 7)
    assert norm == sum((t * t).ravel())


# --- S_{3/2} ------------------------------------------------------------------

@given(sym0s)
def test_psi_of_sym0_lies_in_s32(H):
    P = cl.psi_from_endo(H)
    assert same(cl.s32_project(P), P)
    assert ex.max_abs(cl.contraction(P)) == 0


def test_projection_of_kappa0_e1():
    t = ex.zeros((8, 7))
    t[0, 0] = Fraction(1)
    assert ex.max_abs(cl.contraction(cl.s32_project(t))) == 0


def test_s32_projector_rank_and_shape():
    P = cl.s32_projector_matrix(True)
    assert np.linalg.matrix_rank(ex.to_float(P)) == 48
    assert ex.max_abs(ex.exact_matmul(P, P) - P) == 0
    assert ex.max_abs(P - P.T) == 0


@given(spin_tensors)
def test_s32_membership_conditions(t):
    p = cl.s32_project(t)
    lam, w7, w14, H, tr = cl.decompose_spin_tensor(p)
    assert tr == 0
    # lambda1 + sum_i A_{e_i} alpha_1^(i) = 0
    total = lam + sum((S.cross_endo(e(i + 1)) @ p[1:, i] for i in range(7)), ex.zeros(7))
    assert ex.max_abs(total) == 0


def test_s32_projector_commutes_with_g2():
    P = ex.to_float(cl.s32_projector_matrix(True))
    for h in round_sphere().h_basis:
        hf = ex.to_float(h)
        act = np.kron(cl.spin_lift(hf), np.eye(7)) + np.kron(np.eye(8), hf)
        assert np.abs(P @ act - act @ P).max() < 1e-12


# --- Psi^(H, base) ----------------------------------------------------------------

def test_psi_of_identity():
    P = cl.psi_from_endo(ex.identity())
    for i in range(7):
        assert same(P[:, i], sp(0, e(i + 1)))


def test_psi_of_zero():
    assert ex.max_abs(cl.psi_from_endo(ex.zeros((7, 7)))) == 0


def test_psi_with_other_base():
    base = sp(0, e(2))
    P = cl.psi_from_endo(ex.identity(), base)
    assert same(P[:, 0], cl.clifford_vector(e(1), base))
