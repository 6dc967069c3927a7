from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from g2harmonic import exterior as ex
from g2harmonic.exterior import Form, endo_extend, endo_split, form_inner, hodge, interior, wedge
from g2harmonic.g2algebra import phi0, psi0

from oracles import PHI0, PSI0, dense, wedge_terms


def e(i):
    return ex.unit_vector(i)


def mono(*idx):
    return Form.monomial(idx)


def forms(degree):
    return st.lists(st.integers(-5, 5), min_size=comb(7, degree), max_size=comb(7, degree)).map(
        lambda c: Form(degree, ex.exact(c)))


vectors = st.lists(st.integers(-5, 5), min_size=7, max_size=7).map(ex.exact)
endos = st.lists(st.integers(-4, 4), min_size=49, max_size=49).map(lambda c: ex.exact(np.array(c).reshape(7, 7)))


# --- wedge -------------------------------------------------------------------

def test_wedge_basis_case():
    assert wedge(mono(1), mono(2)) == mono(1, 2)


def test_wedge_repeated_indices_vanish():
    assert wedge(mono(1, 2, 3), mono(1, 2, 3)).is_zero()


def test_phi_wedge_psi_matches_monomial_expansion():
    expected = wedge_terms(PHI0, PSI0)
    assert expected == {(1, 2, 3, 4, 5, 6, 7): 7}
    assert wedge(phi0(), psi0()) == ex.volume_form() * 7


def test_wedge_overflow_gives_zero():
    assert wedge(mono(1, 2, 3, 4), mono(5, 6, 7, 1)).is_zero()


# --- interior ----------------------------------------------------------------

def test_interior_basis_case():
    assert interior(e(1), mono(1, 2)) == mono(2)


def test_interior_disjoint_indices():
    assert interior(e(1), mono(2, 3)).is_zero()


def test_interior_e1_phi0_reads_the_three_monomials():
    expected = mono(2, 3) + mono(7, 6) + mono(4, 5)
    assert interior(e(1), phi0()) == expected


def test_interior_of_function_is_zero():
    assert interior(e(3), Form(0, ex.exact([5]))).degree == 0


# --- hodge -------------------------------------------------------------------

def test_hodge_of_one_is_vol():
    assert hodge(Form(0, ex.exact([1]))) == ex.volume_form()


def test_hodge_phi0_is_monomial_psi0():
    star = hodge(phi0())
    assert star.terms() == {k: Fraction(v) for k, v in dense(PSI0).items()}


def test_hodge_twice_on_e12():
    assert hodge(hodge(mono(1, 2))) == mono(1, 2)


@pytest.mark.parametrize("p", range(8))
def test_hodge_is_an_involution_in_every_degree(p):
    for k in range(comb(7, p)):
        u = ex.basis_form(p, k)
        assert hodge(hodge(u)) == u


# --- inner product -----------------------------------------------------------

def test_form_inner_examples():
    assert form_inner(mono(1, 2), mono(1, 2)) == 1
    assert form_inner(phi0(), phi0()) == 7
    assert form_inner(mono(1, 2), mono(1, 3)) == 0


def test_form_inner_unequal_degrees_is_zero():
    assert form_inner(mono(1), mono(1, 2)) == 0


@given(forms(3), forms(3))
def test_form_inner_defines_wedge_with_star(u, v):
    assert wedge(u, hodge(v)) == ex.volume_form() * form_inner(u, v)


# --- endomorphism action -----------------------------------------------------

@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_identity_acts_as_minus_degree(p):
    u = Form(p, ex.exact(np.arange(comb(7, p)) - 3))
    assert endo_extend(ex.identity(), u) == u * (-p)


def test_zero_endo_acts_as_zero():
    assert endo_extend(ex.zeros((7, 7)), phi0()).is_zero()


def test_diagonal_endo_on_phi_matches_direct_sum():
    H = ex.zeros((7, 7))
    H[0, 0], H[1, 1] = Fraction(1), Fraction(-1)
    # -sum_i H^*(e_i) ^ (e_i _| phi) with H^* = H^T
    direct = Form.zero(3)
    for i in range(7):
        direct = direct - wedge(Form(1, H.T @ e(i + 1)), interior(e(i + 1), phi0()))
    assert endo_extend(H, phi0()) == direct
    assert endo_extend(H, phi0()).terms() == {(1, 4, 5): -1, (1, 6, 7): 1, (2, 4, 6): 1, (2, 5, 7): 1}


@given(endos, endos, forms(3))
def test_endo_action_is_a_lie_algebra_representation(B, C, u):
    B, C = B - B.T, C - C.T
    lhs = endo_extend(B @ C - C @ B, u)
    rhs = endo_extend(B, endo_extend(C, u)) - endo_extend(C, endo_extend(B, u))
    assert lhs == rhs


# --- split -------------------------------------------------------------------

def test_split_identity():
    sym0, skew, tr = endo_split(ex.identity())
    assert ex.max_abs(sym0) == 0 and ex.max_abs(skew) == 0 and tr == 7


def test_split_antisymmetric():
    B = ex.zeros((7, 7))
    B[0, 1], B[1, 0] = Fraction(2), Fraction(-2)
    sym0, skew, tr = endo_split(B)
    assert ex.max_abs(sym0) == 0 and ex.max_abs(skew - B) == 0 and tr == 0


def test_split_rank_one():
    B = ex.zeros((7, 7))
    B[0, 1] = Fraction(1)
    sym0, skew, tr = endo_split(B)
    assert sym0[0, 1] == sym0[1, 0] == Fraction(1, 2)
    assert skew[0, 1] == Fraction(1, 2) and skew[1, 0] == Fraction(-1, 2)
    assert tr == 0


@given(endos)
def test_split_recomposes(B):
    sym0, skew, tr = endo_split(B)
    assert ex.max_abs(sym0 + skew + ex.identity() * (tr / 7) - B) == 0
    assert sum(sym0[i, i] for i in range(7)) == 0
    assert ex.max_abs(sym0 - sym0.T) == 0 and ex.max_abs(skew + skew.T) == 0


# --- algebraic properties ----------------------------------------------------

@given(st.integers(0, 4), st.integers(0, 3), st.data())
def test_graded_commutativity(p, q, data):
    u, v = data.draw(forms(p)), data.draw(forms(q))
    assert wedge(u, v) == wedge(v, u) * (-1) ** (p * q)


@given(st.integers(0, 6), vectors, st.data())
def test_interior_is_adjoint_to_wedge(p, X, data):
    u, v = data.draw(forms(p)), data.draw(forms(p + 1))
    assert form_inner(wedge(Form(1, X), u), v) == form_inner(u, interior(X, v))


@given(st.integers(1, 5), vectors, st.data())
def test_interior_squares_to_zero(p, X, data):
    u = data.draw(forms(p))
    assert interior(X, interior(X, u)).is_zero()


@given(st.integers(0, 7), st.data())
def test_hodge_is_an_isometry(p, data):
    u, v = data.draw(forms(p)), data.draw(forms(p))
    assert form_inner(hodge(u), hodge(v)) == form_inner(u, v)


@given(forms(2), forms(3), endos)
def test_float_backend_agrees_with_exact(u, v, B):
    exact = endo_extend(B, wedge(u, hodge(wedge(v, v))))
    flt = endo_extend(ex.to_float(B), wedge(u.as_float(), hodge(wedge(v.as_float(), v.as_float()))))
    assert np.abs(ex.to_float(exact.coeffs) - flt.coeffs).max() <= 1e-12 * max(1.0, ex.to_float(exact.coeffs).__abs__().max())


def test_form_rejects_bad_sizes():
    with pytest.raises(ValueError):
        Form(2, [1, 2, 3])
    with pytest.raises(ValueError):
        Form(8, [])
