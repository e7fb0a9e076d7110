import math

import numpy as np
import pytest

from mimo_mmac import streams
from mimo_mmac.errors import ValidationError
from mimo_mmac.hardening import determinant_limit_gap, gram_concentration, loglog_slope, median_report

from conftest import flat_users, section6_users


def section6_medians(k, n_t=2, n_r=2, seed=0, draws=33):
    return median_report(lambda d: section6_users(k, seed=seed, n_t=n_t, tag=d), n_r, n_t,
                         lambda d: streams.generator(seed, streams.HARDENING, k, d), draws)


def equal_power_medians(k, seed=0, draws=33):
    users = flat_users([10.0] * k, n_t=2)
    return median_report(lambda d: users, 2, 2, lambda d: streams.generator(seed, streams.HARDENING, k, d),
                         draws)[0]


def diagonal_fixture():
    users = flat_users([4.0], n_t=2)
    return users, math.sqrt(2.0) * np.eye(2)[None]


def test_diagonal_fixture_is_exactly_hardened():
    users, h = diagonal_fixture()
    report = gram_concentration(users, 2, 2, None, channel=h)
    assert report.offdiag_ratio == 0.0 and report.det_gap < 1e-15
    assert determinant_limit_gap(users, 2, 2, 1.0, None, channel=h) < 1e-15
    assert determinant_limit_gap(users, 2, 2, 0.5, None, channel=h / math.sqrt(1.0)) < 1e-15


def test_zero_power_is_rejected():
    users = flat_users([1.0, 1.0], n_t=2, beta=0.0)
    with pytest.raises(ValidationError):
        gram_concentration(users, 2, 2, np.random.default_rng(0))


def test_offdiag_ratio_smaller_with_many_users():
    assert section6_medians(4096)[0].offdiag_ratio < section6_medians(64)[0].offdiag_ratio


def test_offdiag_ratio_clt_rate():
    ks = [2 ** j for j in range(6, 14)]
    slope = loglog_slope(ks, [equal_power_medians(k).offdiag_ratio for k in ks])
    assert -0.65 <= slope <= -0.35


def test_det_gap_below_one_percent_at_4096():
    assert section6_medians(4096)[0].det_gap < 0.01


def test_det_gap_non_increasing():
    gaps = [section6_medians(k)[0].det_gap for k in (2 ** 6, 2 ** 8, 2 ** 10, 2 ** 12)]
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))


def test_half_scale_gap_shrinks_at_same_rate():
    ks = [2 ** j for j in range(6, 13)]
    full, half = zip(*[(r.det_gap, h) for r, h in (section6_medians(k) for k in ks)])
    assert abs(loglog_slope(ks, full) - loglog_slope(ks, half)) < 0.15


def test_transmit_antennas_do_not_change_hardening():
    two = section6_medians(2048, n_t=2)[0].det_gap
    eight = section6_medians(2048, n_t=8)[0].det_gap
    assert abs(two - eight) < 0.005


def test_single_draw_report_fields():
    users = section6_users(100)
    report = gram_concentration(users, 4, 2, np.random.default_rng(0))
    assert report.k_n == 100 and report.samples == 1
    assert report.offdiag_ratio >= 0 and report.det_gap >= 0
