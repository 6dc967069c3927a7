import pytest
from hypothesis import HealthCheck, settings

from g2harmonic.peterweyl.irreps import set_cache_dir

settings.register_profile("g2", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("g2")


@pytest.fixture(scope="session", autouse=True)
def irrep_cache(tmp_path_factory):
    """Persist built irreps for the whole session in a scratch directory."""
    path = tmp_path_factory.mktemp("irreps")
    set_cache_dir(str(path))
    yield path
    set_cache_dir(None)


@pytest.fixture(scope="session")
def spectral_level3():
    from g2harmonic.peterweyl.spectral import spectral_report
    return spectral_report(3)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
