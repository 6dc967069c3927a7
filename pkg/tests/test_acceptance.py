"""The eleven acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line, printed in the terminal summary and on stdout.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from g2harmonic import exterior as ex
from g2harmonic.exterior import hodge, wedge
from g2harmonic.g2algebra import identity_suite, invariant_checks, phi0, psi0
from g2harmonic.homogeneous import CANONICAL, LEVI_CIVITA, curvature, curvature_suite, round_sphere
from g2harmonic.peterweyl import operators as op
from g2harmonic.peterweyl.homspace import hom_space
from g2harmonic.peterweyl.identities import operator_identity_suite
from g2harmonic.peterweyl.irreps import build_irrep
from g2harmonic.peterweyl.spectral import instability_certificate, theorem_check
from g2harmonic.peterweyl.weights import enumerate_weights
from g2harmonic.report import CheckReport

from conftest import ACCEPTANCE_LINES
from oracles import PSI0, dense, sphere_harmonic_dims, wedge_terms

TOL = 1e-8


@contextmanager
def criterion(n, text):
    try:
        yield
    except BaseException:
        line = f"FAIL criterion {n}: {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"PASS criterion {n}: {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _failed(report):
    return sorted({(c.name, c.weight) for c in report.failures()})


def test_criterion_01_exact_identity_suite():
    with criterion(1, "pointwise G2 identities exact over 100 rational trials in < 30 s"):
        t0 = time.perf_counter()
        report = identity_suite(seed=20240101, trials=100, exact_backend=True, tol=0)
        elapsed = time.perf_counter() - t0
        assert len(report.checks) == 11
        assert report.passed, _failed(report)
        assert all(c.residual == 0 for c in report.checks)
        assert elapsed < 30, f"{elapsed:.1f} s"


def test_criterion_02_hodge_of_phi0():
    with criterion(2, "*phi0 = psi0 bit-exactly and phi0 ^ psi0 = 7 vol"):
        assert hodge(phi0()).terms() == {k: Fraction(v) for k, v in dense(PSI0).items()}
        assert hodge(phi0()) == psi0()
        assert wedge(phi0(), psi0()) == ex.volume_form() * 7
        assert wedge_terms([(1, m) for m in [(1, 2, 3)]], [(1, (4, 5, 6, 7))]) == {(1, 2, 3, 4, 5, 6, 7): 1}


def test_criterion_03_i_and_j():
    with criterion(3, "j o i = -8 on Sym0 and i(Sym0) is the rank-27 kernel of ^phi and ^psi"):
        report = invariant_checks()
        for name in ("j-after-i-is-minus-8", "i-lands-in-lambda3-27", "i-image-is-lambda3-27"):
            (check,) = report.by_name(name)
            assert check.ok and check.residual == 0, name


def test_criterion_04_round_sphere_curvature():
    with criterion(4, "Ric = 6g, canonical Ric = 16/3 g, curvature difference and chi-Bianchi exact"):
        model = round_sphere()
        eye = np.eye(7, dtype=object)
        assert (curvature(model, LEVI_CIVITA).ricci() == 6 * eye).all()
        assert (curvature(model, CANONICAL).ricci() == Fraction(16, 3) * eye).all()
        report = curvature_suite(model)
        for name in ("ricci-einstein-6", "ricci-canonical-16/3", "curvature-difference", "bianchi-canonical"):
            (check,) = report.by_name(name)
            assert check.ok and check.residual in (None, 0), name


def test_criterion_05_normalization_pin():
    with criterion(5, "Laplacian on functions at (0,0,1) has eigenvalue 7 with multiplicity 8"):
        w = (0, 0, 1)
        blk = hom_space(w, "Functions")
        calc = op.BlockCalculus(w)
        L = op.block_operator(blk, blk, lambda X: calc.laplace(X, "L0"))
        assert np.abs(L.matrix - 7 * np.eye(blk.block_dim)).max() < TOL
        assert build_irrep(w).dim * op.kernel_dim(L, 7.0, TOL) == 8 == sphere_harmonic_dims(1)


def test_criterion_06_operator_identity_suite():
    with criterion(6, "block operator identities hold at every weight with a+b+c <= 3 in < 5 min"):
        t0 = time.perf_counter()
        report = CheckReport()
        for w in enumerate_weights(3):
            report.extend(operator_identity_suite(w, TOL))
        elapsed = time.perf_counter() - t0
        assert elapsed < 300, f"{elapsed:.1f} s"
        assert report.passed, _failed(report)


def test_criterion_07_killing_spinors(spectral_level3):
    with criterion(7, "Killing kernel totals 8, agrees with the D = -7/2 eigenspace, concentrated in (0,0,1)"):
        rows = spectral_level3.rows
        killing = {tuple(r["weight"]): r["killing"] for r in rows if r["killing"]}
        dirac = {tuple(r["weight"]): r["diracMinusSevenHalves"] for r in rows if r["diracMinusSevenHalves"]}
        assert spectral_level3.total("killing") == 8
        assert spectral_level3.total("diracMinusSevenHalves") == 8
        assert killing == dirac
        assert set(killing) == {(0, 0, 1)}, f"kernel carried by {sorted(killing)}"


def test_criterion_08_theorem_b(spectral_level3):
    with criterion(8, "dim ker Q in S3/2 = dim{*d gamma = -gamma/2} blockwise, both zero"):
        for r in spectral_level3.rows:
            assert r["kerQ"] == r["rGamma"] == 0, r["weight"]
        assert theorem_check("B", 3, spectral_level3).passed


def test_criterion_09_theorem_a(spectral_level3):
    with criterion(9, "Killing spinor deformations = D3 + K+ blockwise and dim D1 = dim K+ - 1"):
        for r in spectral_level3.rows:
            assert r["deformationH"] + r["killing"] == r["d3"] + r["killing"], r["weight"]
        t = spectral_level3.totals()
        assert t["d1"] == t["killing"] - 1 == 7
        assert theorem_check("A", 3, spectral_level3).passed


def test_criterion_10_constrained_space(spectral_level3):
    with criterion(10, "ker D_TM in S3/2 has no 1-form part and the constrained space splits into *d = -1/2, -3/2"):
        for r in spectral_level3.rows:
            assert r["kerS32OneFormComponent"] < TOL, r["weight"]
            assert r["dDeltaPiece"] == 0 and r["oneFormMinusThreeQuarters"] == 0, r["weight"]
            assert r["largeSpace"] == r["starDMinusHalf"] + r["starDMinusThreeHalves"] == r["largeSpaceSpan"]
        for name in ("constrained-space/decomposition", "ker-twisted-dirac-s32/one-form-part",
                     "one-forms/no-negative-eigenvalue"):
            assert all(c.ok for c in spectral_level3.checks.by_name(name)), name


def test_criterion_11_instability(spectral_level3):
    with criterion(11, "R_H in ker(Laplacian - 13/4), certificate 13/4 - 12 < 0, verdict no witness"):
        for r in spectral_level3.rows:
            assert r["rHLaplaceResidual"] < TOL, r["weight"]
        report = instability_certificate(3, spectral_level3, TOL)
        assert report.passed, _failed(report)
        assert Fraction(report.data["certificateConstant"]) == Fraction(13, 4) - 2 * 6 < 0
        assert report.data["verdict"].startswith("no witness")
