import numpy as np
import pytest

from dynframes.sequences import SequenceSpec, generate


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20261016))


@pytest.fixture
def geo05():
    return generate(SequenceSpec("geometric", 12, 0.5))


def random_disc_points(rng, k, rmax=0.95):
    r = rmax * np.sqrt(rng.random(k))
    return r * np.exp(2j * np.pi * rng.random(k))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
