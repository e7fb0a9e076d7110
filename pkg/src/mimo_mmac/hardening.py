"""Empirical checks that the Gram sum concentrates around a scaled identity.

The off-diagonal statistic is normalized by the diagonal: an un-normalized
sum of k zero-mean terms grows like sqrt(k), the ratio decays like k^(-1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import UserProfile, draw_fading, effective_sum_power, stack_profiles
from .errors import ValidationError
from .numerics import gram_batch, logdet_eye_plus_batch

DEFAULT_DRAWS = 33


@dataclass(frozen=True)
class HardeningReport:
    k_n: int
    offdiag_ratio: float
    det_gap: float
    samples: int = 1


def _limit(profiles, n_r, scale) -> float:
    s = effective_sum_power(profiles)
    if s <= 0:
        raise ValidationError("all users have zero received power")
    return n_r * math.log1p(scale * s)


def offdiag_ratio(g: np.ndarray) -> float:
    """``max_{i != j} |G_ij| / min_i G_ii``."""
    n = g.shape[0]
    diag = np.real(np.diag(g))
    if n == 1:
        return 0.0
    off = np.abs(g[~np.eye(n, dtype=bool)]).max()
    return float(off / diag.min())


def _gram(profiles, n_r, n_t, rng, channel=None):
    betas, qs = stack_profiles(profiles)
    h = draw_fading(betas, n_r, n_t, rng) if channel is None else np.asarray(channel)
    return gram_batch(h, qs)


def gram_concentration(profiles: Sequence[UserProfile], n_r: int, n_t: int,
                       rng: np.random.Generator, channel=None) -> HardeningReport:
    """Single-draw off-diagonal ratio and relative determinant gap.

    ``channel`` (shape (k, n_r, n_t)) replaces the random draw when given.
    """
    limit = _limit(profiles, n_r, 1.0)
    g = _gram(profiles, n_r, n_t, rng, channel)
    gap = abs(float(logdet_eye_plus_batch(g)) - limit) / limit
    return HardeningReport(len(profiles), offdiag_ratio(g), gap, 1)


def determinant_limit_gap(profiles: Sequence[UserProfile], n_r: int, n_t: int, scale: float,
                          rng: np.random.Generator, channel=None) -> float:
    """Relative gap of ``log det(I + scale G)`` from ``N_R log(1 + scale sum beta Tr Q)``."""
    if not scale > 0:
        raise ValidationError("scale must be positive")
    limit = _limit(profiles, n_r, scale)
    g = _gram(profiles, n_r, n_t, rng, channel)
    return abs(float(logdet_eye_plus_batch(g, scale)) - limit) / limit


def median_report(population: Callable[[int], Sequence[UserProfile]], n_r: int, n_t: int,
                  rng_for: Callable[[int], np.random.Generator],
                  draws: int = DEFAULT_DRAWS) -> tuple[HardeningReport, float]:
    """Medians over ``draws`` independent (population, channel) pairs.

    Returns the median report and the median half-scale determinant gap.
    """
    ratios, gaps, half = [], [], []
    k_n = 0
    for d in range(draws):
        profiles = population(d)
        k_n = len(profiles)
        rng = rng_for(d)
        betas, qs = stack_profiles(profiles)
        g = gram_batch(draw_fading(betas, n_r, n_t, rng), qs)
        ratios.append(offdiag_ratio(g))
        full = _limit(profiles, n_r, 1.0)
        gaps.append(abs(float(logdet_eye_plus_batch(g)) - full) / full)
        lim_half = _limit(profiles, n_r, 0.5)
        half.append(abs(float(logdet_eye_plus_batch(g, 0.5)) - lim_half) / lim_half)
    report = HardeningReport(k_n, float(np.median(ratios)), float(np.median(gaps)), draws)
    return report, float(np.median(half))


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
