from fractions import Fraction

import pytest

from g2harmonic.peterweyl.spectral import (INSTABILITY_EIGENVALUE, bundle_tag, instability_certificate,
                                           theorem_check)

from oracles import dirac_multiplicity, laplace_eigenvalue, sphere_harmonic_dims


def test_totals(spectral_level3):
    t = spectral_level3.totals()
    assert t["killing"] == 8
    assert t["diracMinusSevenHalves"] == 8
    assert t["d1"] == 7 == t["killing"] - 1
    assert t["kerQ"] == t["rGamma"] == t["rH"] == t["d3"] == 0


def test_consistency_checks_pass(spectral_level3):
    assert spectral_level3.checks.passed


def test_function_spectrum_matches_round_sphere(spectral_level3):
    spec = dict(spectral_level3.spectrum("Functions"))
    for k in range(4):
        assert spec[float(laplace_eigenvalue(k))] == sphere_harmonic_dims(k)


def test_dirac_spectrum_matches_round_sphere(spectral_level3):
    spec = dict(spectral_level3.spectrum("Spinors"))
    for k in range(3):
        assert spec[3.5 + k] == spec[-3.5 - k] == dirac_multiplicity(k)


def test_killing_spinors_sit_in_two_weights(spectral_level3):
    carried = {tuple(r["weight"]): r["killing"] for r in spectral_level3.rows if r["killing"]}
    assert carried == {(0, 0, 0): 1, (1, 0, 0): 1}


def test_row_lookup(spectral_level3):
    assert spectral_level3.row((1, 0, 0))["dimV"] == 7
    with pytest.raises(KeyError):
        spectral_level3.row((4, 0, 0))


@pytest.mark.parametrize("which", ["A", "B", "b"])
def test_theorems_hold_blockwise(spectral_level3, which):
    rep = theorem_check(which, 3, spectral_level3)
    assert rep.passed


def test_theorem_a_totals(spectral_level3):
    t = theorem_check("A", 3, spectral_level3).data["totals"]
    assert t == {"deformations": 8, "D3": 0, "K+": 8, "D1": 7}


def test_theorem_rejects_unknown():
    with pytest.raises(ValueError):
        theorem_check("C", 0)


def test_instability_certificate(spectral_level3):
    rep = instability_certificate(3, spectral_level3)
    assert rep.passed
    assert rep.data["verdict"] == "no witness (R_H = 0)"
    assert Fraction(rep.data["certificateConstant"]) == Fraction(-35, 4)
    assert INSTABILITY_EIGENVALUE == Fraction(13, 4)


@pytest.mark.parametrize("name,tag", [("functions", "Functions"), ("one-forms", "OneForms"),
                                      ("Three_Forms27", "ThreeForms27"), ("s32", "S32"),
                                      ("spin-tensors", "SpinorValued1Forms"), ("Sym0", "Sym0")])
def test_bundle_aliases(name, tag):
    assert bundle_tag(name) == tag


def test_unknown_bundle():
    with pytest.raises(KeyError):
        bundle_tag("twistors")


def test_to_dict_filters_bundle(spectral_level3):
    d = spectral_level3.to_dict("Functions")
    assert set(d["spectra"]) == {"Functions"}
    assert all(set(r["eigenvalues"]) == {"Functions"} for r in d["rows"])
    assert d["totals"]["killing"] == 8
