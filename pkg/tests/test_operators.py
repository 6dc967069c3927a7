import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2harmonic.linalg import IndeterminateRank
from g2harmonic.peterweyl import operators as op
from g2harmonic.peterweyl.homspace import hom_space
from g2harmonic.peterweyl.spectral import WeightOperators
from g2harmonic.peterweyl.weights import enumerate_weights

from oracles import laplace_eigenvalue

LOW = enumerate_weights(2)
weights = st.sampled_from(LOW)


def sq(w, tag, fn):
    blk = hom_space(w, tag)
    return op.block_operator(blk, blk, fn)


# --- kernel dimension ------------------------------------------------------------

def test_identity_shift_one_is_full():
    I = op.identity_operator(hom_space((1, 0, 1), "OneForms"))
    assert op.kernel_dim(I, 1.0) == I.shape[0] > 0


def test_identity_shift_zero_is_empty():
    I = op.identity_operator(hom_space((1, 0, 1), "OneForms"))
    assert op.kernel_dim(I, 0.0) == 0


def test_kernel_dim_guard_band():
    with pytest.raises(IndeterminateRank):
        op.kernel_dim(np.diag([1.0, 3e-6]), 0.0)


def test_kernel_dim_needs_square():
    with pytest.raises(ValueError):
        op.kernel_dim(np.zeros((2, 3)))


# --- first-order assembly ------------------------------------------------------------

def test_zero_symbol_identity_zeroth():
    blk = hom_space((1, 0, 1), "OneForms")
    B = op.assemble_first_order(blk, blk, np.zeros((7, 7, 7)), np.eye(7))
    assert np.allclose(B.matrix, np.eye(blk.block_dim))


def test_assembly_rejects_weight_mismatch():
    with pytest.raises(ValueError):
        op.assemble_first_order(hom_space((0, 0, 1), "Functions"), hom_space((0, 0, 2), "Functions"),
                                np.zeros((7, 1, 1)))


def test_function_laplacian_at_spin_weight():
    c = op.BlockCalculus((0, 0, 1))
    L = sq((0, 0, 1), "Functions", lambda X: c.laplace(X, "L0"))
    assert np.allclose(L.matrix, 7.0 * np.eye(1), atol=1e-8)
    assert op.kernel_dim(L, 7.0) == hom_space((0, 0, 1), "Functions").block_dim == 1


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_function_laplacian_round_sphere_spectrum(k):
    w = (0, 0, k)
    c = op.BlockCalculus(w)
    L = sq(w, "Functions", lambda X: c.laplace(X, "L0"))
    assert np.allclose(L.matrix, float(laplace_eigenvalue(k)), atol=1e-8)


def test_delta_after_d_is_laplacian_on_functions():
    w = (0, 0, 1)
    c = op.BlockCalculus(w)
    F, L1 = hom_space(w, "Functions"), hom_space(w, "OneForms")
    d = op.block_operator(F, L1, lambda X: c.d(X, 0))
    de = op.block_operator(L1, F, lambda X: c.delta(X, 1))
    lap = op.block_operator(F, F, lambda X: c.laplace(X, "L0"))
    assert np.allclose((de @ d).matrix, lap.matrix, atol=1e-10)


def test_star_d_on_trivial_weight_is_empty():
    W = WeightOperators((0, 0, 0))
    assert W.blk("ThreeForms27").block_dim == 0
    assert W.star_d().matrix.shape[1] == 0


def test_dirac_eigenvalues_on_spin_blocks():
    # D has -7/2 on the Killing spinors, carried by (0,0,0) and (1,0,0); +7/2 lives in (0,0,1)
    ev = {}
    for w in [(0, 0, 0), (1, 0, 0), (0, 0, 1)]:
        c = op.BlockCalculus(w)
        D = sq(w, "Spinors", c.dirac)
        ev[w] = sorted(np.round(np.linalg.eigvalsh(0.5 * (D.matrix + D.matrix.T)), 8))
    assert ev[(0, 0, 0)] == [-3.5]
    assert -3.5 in ev[(1, 0, 0)]
    assert ev[(0, 0, 1)][-1] == 3.5 and -3.5 not in ev[(0, 0, 1)]


@pytest.mark.parametrize("w", [(0, 0, 1), (1, 0, 1), (0, 1, 1)])
def test_rarita_schwinger_operator_is_symmetric(w):
    Q = WeightOperators(w).rarita_schwinger()
    assert Q.shape[0] > 0
    assert Q.symmetry_defect() < 1e-10


# --- operator algebra ------------------------------------------------------------

def test_block_operator_composition_is_associative():
    w = (1, 0, 1)
    c = op.BlockCalculus(w)
    A = sq(w, "OneForms", lambda X: c.laplace(X, "L1"))
    B = sq(w, "OneForms", lambda X: c.laplace_bar(X, "L1"))
    C = op.identity_operator(hom_space(w, "OneForms")).scaled(2.0)
    assert np.allclose(((A @ B) @ C).matrix, (A @ (B @ C)).matrix)
    assert np.allclose((A - B).adjoint().matrix, (A - B).matrix.T)


@given(weights, st.sampled_from([1, 2, 3]))
@settings(max_examples=12)
def test_hodge_and_weitzenboeck_laplacians_agree(w, p):
    c = op.BlockCalculus(w)
    blk = hom_space(w, ["OneForms", "TwoForms7", "ThreeForms27"][p - 1])
    if blk.block_dim == 0:
        return
    X = blk.basis
    assert np.abs(c.form_laplace(X, p) - c.laplace(X, f"L{p}")).max() < 1e-9


@given(weights)
@settings(max_examples=8)
def test_d_squared_vanishes(w):
    c = op.BlockCalculus(w)
    for p, tag in ((0, "Functions"), (1, "OneForms")):
        blk = hom_space(w, tag)
        if blk.block_dim:
            assert np.abs(c.d(c.d(blk.basis, p), p + 1)).max() < 1e-9


@given(weights)
@settings(max_examples=8)
def test_laplacians_are_symmetric_and_nonnegative(w):
    c = op.BlockCalculus(w)
    for tag, mod in (("Functions", "L0"), ("OneForms", "L1"), ("ThreeForms27", "L3")):
        blk = hom_space(w, tag)
        if blk.block_dim == 0:
            continue
        proj = tag == "ThreeForms27"  # Delta does not preserve type; compress to the block
        L = op.block_operator(blk, blk, lambda X: c.laplace(X, mod), project=proj)
        assert L.symmetry_defect() < 1e-9
        assert np.linalg.eigvalsh(0.5 * (L.matrix + L.matrix.T)).min() > -1e-9


@given(weights)
@settings(max_examples=8)
def test_zeroth_order_symbols_are_intertwiners(w):
    # psi. (x) Id preserves the spinor-valued 1-form block
    blk = hom_space(w, "SpinorValued1Forms")
    if blk.block_dim == 0:
        return
    M = np.kron(op.clifford_form("psi"), np.eye(7))
    B = op.block_operator(blk, blk, lambda X: np.matmul(M, X))
    assert B.residual < 1e-10
