import numpy as np
import pytest

from mimo_mmac.errors import ConfigurationError, TrialError
from mimo_mmac.montecarlo import estimate, sample

from conftest import flat_users, section6_users


def test_constant_evaluator():
    est = estimate(lambda h: np.full(h.shape[0], 3.5), flat_users([1.0]), 1, 1, 100, 42)
    assert est.mean == 3.5 and est.std_error == 0.0 and est.trials == 100 and est.master_seed == 42


def first_entry_power(h):
    return np.abs(h[:, 0, 0, 0]) ** 2


def test_known_second_moment():
    est = estimate(first_entry_power, flat_users([1.0]), 1, 1, 100_000, 1)
    assert abs(est.mean - 1.0) < 3 * est.std_error


@pytest.mark.parametrize("workers", [2, 4, 8])
def test_worker_count_does_not_change_results(workers):
    users = section6_users(64)

    def logpow(h):
        return np.log1p(np.sum(np.abs(h) ** 2, axis=(1, 2, 3)))

    # small blocks force several blocks per worker
    one = estimate(logpow, users, 2, 2, 3000, 99, workers=1)
    many = estimate(logpow, users, 2, 2, 3000, 99, workers=workers)
    assert one == many


def test_unbatched_evaluator_matches_batched():
    users = section6_users(5)
    a = sample(first_entry_power, users, 2, 2, 50, 3)
    b = sample(lambda d: abs(d[0][0, 0]) ** 2, users, 2, 2, 50, 3, batched=False)
    assert np.allclose(a, b, rtol=1e-14, atol=0)


def test_non_finite_value_reports_trial():
    def bad(h):
        out = np.ones(h.shape[0])
        out[h.shape[0] - 1] = np.nan
        return out

    with pytest.raises(TrialError) as info:
        estimate(bad, flat_users([1.0]), 1, 1, 10, 0)
    assert info.value.trial == 9


def test_needs_two_trials():
    with pytest.raises(ConfigurationError):
        estimate(first_entry_power, flat_users([1.0]), 1, 1, 1, 0)


def test_std_error_scales_as_inverse_sqrt():
    users = flat_users([1.0])
    base = estimate(first_entry_power, users, 1, 1, 1000, 5).std_error
    big = estimate(first_entry_power, users, 1, 1, 16000, 5).std_error
    assert 0.8 * 4 <= base / big <= 1.2 * 4
