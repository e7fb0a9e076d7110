import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimo_mmac.errors import ConfigurationError, ValidationError
from mimo_mmac.numerics import (check_hermitian_psd, gram_sum, logdet_eye_plus, logdet_eye_plus_batch,
                                logdet_eye_plus_eig)

from conftest import random_psd


def gram_oracle(channels, covariances):
    """Entry-wise double sum g_ij = sum_t sum_n sum_m h_im q_mn conj(h_jn)."""
    n_r = len(channels[0])
    g = [[0j] * n_r for _ in range(n_r)]
    for h, q in zip(channels, covariances):
        n_t = len(q)
        for i in range(n_r):
            for j in range(n_r):
                acc = 0j
                for n in range(n_t):
                    for m in range(n_t):
                        acc += h[i][m] * q[m][n] * h[j][n].conjugate()
                g[i][j] += acc
    return np.array(g)


def test_gram_sum_empty():
    assert np.array_equal(gram_sum([], [], n_r=2), np.zeros((2, 2)))


def test_gram_sum_identity():
    assert np.allclose(gram_sum([np.eye(2)], [np.eye(2)]), np.eye(2), atol=0)


def test_gram_sum_matches_scalar_oracle(rng):
    p = 3.0
    hs = [rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)) for _ in range(2)]
    qs = [np.eye(2) * p / 2 for _ in range(2)]
    expected = gram_oracle([h.tolist() for h in hs], [q.tolist() for q in qs])
    assert np.max(np.abs(gram_sum(hs, qs) - expected)) < 1e-10


def test_gram_sum_general_covariance_matches_oracle(rng):
    hs = [rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)) for _ in range(5)]
    qs = [random_psd(rng, 3) for _ in range(5)]
    expected = gram_oracle([h.tolist() for h in hs], [q.tolist() for q in qs])
    assert np.max(np.abs(gram_sum(hs, qs) - expected)) < 1e-10


def test_gram_sum_errors():
    with pytest.raises(ConfigurationError):
        gram_sum([np.eye(2)], [])
    with pytest.raises(ConfigurationError):
        gram_sum([np.eye(2), np.ones((3, 2))], [np.eye(2), np.eye(2)])
    with pytest.raises(ConfigurationError):
        gram_sum([np.eye(2)], [np.eye(3)])
    with pytest.raises(ValidationError):
        gram_sum([np.eye(2)], [np.array([[1.0, 1.0], [0.0, 1.0]])])
    with pytest.raises(ValidationError):
        gram_sum([np.eye(2)], [np.diag([1.0, -1.0])])


def test_logdet_trivial_cases():
    assert logdet_eye_plus(np.zeros((3, 3)), 1.0) == 0.0
    assert logdet_eye_plus(np.eye(4), 1.0) == pytest.approx(4 * math.log(2), abs=1e-14)


def test_logdet_matches_eigen_oracle(rng):
    g = random_psd(rng, 8)
    expected = sum(math.log1p(0.5 * lam) for lam in np.linalg.eigvalsh(g))
    assert abs(logdet_eye_plus(g, 0.5) - expected) < 1e-9


def test_logdet_no_overflow_for_large_determinants():
    # det(I + G) = (1 + 1e12)^64 overflows a double
    g = 1e12 * np.eye(64)
    assert logdet_eye_plus(g) == pytest.approx(64 * math.log1p(1e12), rel=1e-14)


def test_logdet_rejects_bad_input():
    with pytest.raises(ValidationError):
        logdet_eye_plus(np.diag([1.0, -5.0]))
    with pytest.raises(ValidationError):
        logdet_eye_plus(np.eye(2), 0.0)
    with pytest.raises(ValidationError):
        logdet_eye_plus(np.array([[1.0, 2.0], [0.0, 1.0]]))


@st.composite
def psd_matrices(draw, max_dim=32):
    dim = draw(st.integers(1, max_dim))
    rank = draw(st.integers(1, dim))
    seed = draw(st.integers(0, 2**32 - 1))
    scale = draw(st.sampled_from([1e-3, 1.0, 1e3]))
    return scale * random_psd(np.random.default_rng(seed), dim, rank)


@settings(max_examples=60, deadline=None)
@given(psd_matrices(), st.floats(1e-3, 10.0))
def test_logdet_nonnegative_and_routes_agree(g, s):
    chol = logdet_eye_plus(g, s)
    eig = logdet_eye_plus_eig(g, s)
    assert chol >= 0
    assert abs(chol - eig) <= 1e-9 * max(1.0, abs(eig))


@settings(max_examples=40, deadline=None)
@given(psd_matrices(max_dim=8), st.integers(0, 2**32 - 1))
def test_logdet_monotone_in_psd_order(g, seed):
    extra = random_psd(np.random.default_rng(seed), g.shape[0], 1)
    assert logdet_eye_plus(g + extra) >= logdet_eye_plus(g) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4), st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_gram_sum_output_is_hermitian_psd(n_r, n_t, k, seed):
    rng = np.random.default_rng(seed)
    hs = [rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t)) for _ in range(k)]
    qs = [random_psd(rng, n_t) for _ in range(k)]
    check_hermitian_psd(gram_sum(hs, qs, n_r=n_r))


def test_batch_logdet_is_independent_of_batch_composition(rng):
    gs = np.stack([random_psd(rng, 3) for _ in range(10)])
    whole = logdet_eye_plus_batch(gs)
    parts = np.concatenate([logdet_eye_plus_batch(gs[:3]), logdet_eye_plus_batch(gs[3:])])
    assert np.array_equal(whole, parts)
