import pytest

from g2harmonic.peterweyl.homspace import hom_space
from g2harmonic.peterweyl.identities import operator_identity_suite
from g2harmonic.peterweyl.weights import enumerate_weights

# The published constants in the twisted Dirac square difference and the cited twisted
# Lichnerowicz constant are off; their corrected variants are checked alongside.
KNOWN_DEFECTS = {
    "twisted-dirac-squared-difference/printed",
    "twisted-dirac-squared-difference/local-printed",
    "lichnerowicz/twisted-cited-constant",
}


@pytest.fixture(scope="module")
def suites():
    return {w: operator_identity_suite(w, 1e-8) for w in enumerate_weights(3)}


@pytest.mark.parametrize("w", enumerate_weights(3), ids=str)
def test_identities_hold_at_weight(suites, w):
    bad = {c.name for c in suites[w].failures()}
    assert bad <= KNOWN_DEFECTS, sorted(bad - KNOWN_DEFECTS)


@pytest.mark.parametrize("w", enumerate_weights(3), ids=str)
def test_printed_constants_fail_where_spin_tensors_occur(suites, w):
    bad = {c.name for c in suites[w].failures()}
    if hom_space(w, "SpinorValued1Forms").block_dim:
        assert bad == KNOWN_DEFECTS
    else:
        assert not bad


def test_corrected_variants_pass_everywhere(suites):
    for rep in suites.values():
        for name in ("twisted-dirac-squared-difference/corrected",
                     "twisted-dirac-squared-difference/local-corrected", "lichnerowicz/twisted"):
            assert all(c.ok for c in rep.by_name(name))


def test_every_check_carries_an_anchor_and_weight(suites):
    rep = suites[(1, 0, 1)]
    assert len(rep.checks) == 35
    for c in rep.checks:
        assert c.anchor and c.weight == (1, 0, 1)
        assert c.residual is None or c.residual >= 0


def test_suite_is_deterministic(suites):
    again = operator_identity_suite((0, 1, 0), 1e-8)
    assert again.to_dict() == suites[(0, 1, 0)].to_dict()
