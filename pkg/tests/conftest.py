import time

import numpy as np
import pytest

from doubleris import SystemConfig, build_correlation_set, optimal_phase_config
from doubleris.correlation import RisGeometry
from doubleris.montecarlo import simulate

DESK_TRIALS = 10_000


@pytest.fixture(scope="session")
def desk():
    return SystemConfig.desk_scale()


@pytest.fixture(scope="session")
def desk_corr(desk):
    return build_correlation_set(desk)


@pytest.fixture(scope="session")
def desk_phases(desk):
    return optimal_phase_config(desk.N1, desk.N2)


@pytest.fixture(scope="session")
def desk_samples(desk, desk_corr, desk_phases):
    """10^4 trials of the desk-scale scenario, with the wall time it took."""
    t0 = time.perf_counter()
    samples = simulate(desk, desk_corr, desk_phases, DESK_TRIALS, workers=1)
    return samples, time.perf_counter() - t0


@pytest.fixture(scope="session")
def tiny():
    """Small scenario (M = 4, 4 x 4 surfaces) for fast statistical unit tests."""
    g = RisGeometry(4, 4, 0.025, 0.1, 0.025, 0.025)
    return SystemConfig.default(M=4, ris1=g, ris2=g, trials=4000)


@pytest.fixture(scope="session")
def tiny_corr(tiny):
    return build_correlation_set(tiny)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
