import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import exp1

from mimo_mmac.channel import with_transmit_antennas
from mimo_mmac.errors import ValidationError
from mimo_mmac.montecarlo import McSettings
from mimo_mmac.rates import (RateAllocation, asymptotic_sum_rate, expected_sum_rate, message_length_rates,
                             mu_coefficients, relative_gap)

from conftest import flat_users, section6_users

RAYLEIGH_1X1 = math.e * exp1(1.0)  # E log(1 + |alpha|^2), alpha ~ CN(0, 1)


def test_mu_coefficients():
    assert mu_coefficients([2.0] * 4) == [0.25] * 4
    assert mu_coefficients([1, 3]) == [0.25, 0.75]
    with pytest.raises(ValidationError):
        mu_coefficients([])
    with pytest.raises(ValidationError):
        mu_coefficients([1.0, 0.0])


@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=200))
def test_mu_coefficients_normalized(sizes):
    assert abs(math.fsum(mu_coefficients(sizes)) - 1.0) < 1e-12


def test_zero_users():
    est = expected_sum_rate([], 2, 2)
    assert est.mean == 0.0 and est.std_error == 0.0
    assert asymptotic_sum_rate([], 2) == 0.0


def test_rayleigh_closed_form():
    assert RAYLEIGH_1X1 == pytest.approx(0.59634736, abs=1e-8)
    est = expected_sum_rate(flat_users([1.0]), 1, 1, McSettings(trials=100_000, seed=1))
    assert abs(est.mean - RAYLEIGH_1X1) < 3 * est.std_error


def test_asymptotic_trivial():
    assert asymptotic_sum_rate(flat_users([1.0]), 2) == pytest.approx(2 * math.log(2), rel=1e-15)


def test_section6_close_to_asymptotic():
    users = section6_users(256)
    est = expected_sum_rate(users, 2, 2, McSettings(trials=2000, seed=3))
    assert relative_gap(est.mean, asymptotic_sum_rate(users, 2)) < 0.05


def median_gap(k, populations=9, trials=300):
    gaps = []
    for p in range(populations):
        users = section6_users(k, seed=p, tag=1)
        est = expected_sum_rate(users, 2, 2, McSettings(trials=trials, seed=p))
        gaps.append(relative_gap(est.mean, asymptotic_sum_rate(users, 2)))
    return float(np.median(gaps))


def test_gap_shrinks_with_users():
    assert median_gap(512) < median_gap(32)


def test_message_length_rates():
    alloc = RateAllocation.symmetric(100, 50)
    rates = message_length_rates(alloc, 3.0)
    assert len(set(rates)) == 1
    assert message_length_rates(RateAllocation((100.0,), 100), 3.0) == [300.0]
    with pytest.raises(ValidationError):
        RateAllocation((1.0, 2.0), 4)
    with pytest.raises(ValidationError):
        RateAllocation((5.0, -1.0), 4)


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=100), st.integers(1, 5000),
       st.floats(1e-3, 1e3))
def test_rates_conserve_sum(sizes, n, sum_rate):
    alloc = RateAllocation.from_message_sizes(sizes, n)
    rates = message_length_rates(alloc, sum_rate)
    assert abs(math.fsum(rates) / (n * sum_rate) - 1.0) < 1e-12


def test_adding_a_user_increases_sum_rate():
    users = section6_users(16)
    mc = McSettings(trials=200, seed=8)
    before = expected_sum_rate(users[:-1], 2, 2, mc)
    after = expected_sum_rate(users, 2, 2, mc)
    assert after.mean > before.mean


def test_transmit_antennas_do_not_matter_at_scale():
    users = section6_users(512)
    mc = McSettings(trials=500, seed=4)
    two = expected_sum_rate(with_transmit_antennas(users, 2), 2, 2, mc).mean
    eight = expected_sum_rate(with_transmit_antennas(users, 8), 2, 8, mc).mean
    assert abs(two - eight) / eight < 0.02


def test_receive_antennas_scale_linearly():
    users = section6_users(512)
    mc = McSettings(trials=300, seed=5)
    ratio = expected_sum_rate(users, 8, 2, mc).mean / expected_sum_rate(users, 2, 2, mc).mean
    assert 3.8 <= ratio <= 4.2


def test_sum_rate_grows_like_log_n():
    ns = [64, 128, 256, 512, 1024, 2048]
    medians = []
    for n in ns:
        vals = [expected_sum_rate(section6_users(n // 2, seed=p, tag=2), 2, 2,
                                  McSettings(trials=100, seed=p)).mean for p in range(15)]
        medians.append(np.median(vals))
    r = np.corrcoef(np.log(ns), medians)[0, 1]
    assert r ** 2 >= 0.98
