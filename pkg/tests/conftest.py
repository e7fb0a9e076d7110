import numpy as np
import pytest

from mimo_mmac import streams
from mimo_mmac.channel import SECTION6_FADING, SECTION6_POWER, UserProfile, isotropic, sample_user_profiles


def section6_users(k, seed=7, n_t=2, tag=0):
    """Users drawn with the numerical-results parameters."""
    rng = streams.generator(seed, streams.PROFILES, k, tag)
    return sample_user_profiles(k, SECTION6_FADING, SECTION6_POWER, rng, n_t)


def flat_users(powers, n_t=1, beta=1.0):
    """Users with a common beta and the given transmit powers."""
    return [UserProfile(k, 1.0, beta, beta, float(p), isotropic(float(p), n_t))
            for k, p in enumerate(powers)]


def random_psd(rng, dim, rank=None):
    rank = dim if rank is None else rank
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return a @ a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20190501)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
