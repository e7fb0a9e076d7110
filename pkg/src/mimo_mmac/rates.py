"""Sum rate, its large-system limit, and message-length rate allocation.

All rates are in nats. Sum rates are per channel use; message-length rates
are per codeword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import montecarlo
from .channel import UserProfile, effective_sum_power
from .errors import ValidationError
from .montecarlo import McEstimate, McSettings
from .numerics import gram_batch, logdet_eye_plus_batch


@dataclass(frozen=True)
class RateAllocation:
    """Per-user shares ``c_k`` of ``n`` times the sum rate; ``sum(c) == n``."""

    c: tuple[float, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if not self.c or any(not x > 0 for x in self.c):
            raise ValidationError("allocation coefficients must be positive")
        total = math.fsum(self.c)
        if abs(total - self.n) > 1e-9 * self.n:
            raise ValidationError(f"coefficients sum to {total}, expected n={self.n}")

    @classmethod
    def symmetric(cls, n: int, k_n: int) -> "RateAllocation":
        return cls((n / k_n,) * k_n, n)

    @classmethod
    def from_message_sizes(cls, message_log_sizes: Sequence[float], n: int) -> "RateAllocation":
        return cls(tuple(n * m for m in mu_coefficients(message_log_sizes)), n)


def mu_coefficients(message_log_sizes: Sequence[float]) -> list[float]:
    """``mu_k = log M_k / sum_t log M_t``."""
    sizes = [float(s) for s in message_log_sizes]
    if not sizes:
        raise ValidationError("need at least one message size")
    if any(not s > 0 for s in sizes):
        raise ValidationError("message log-sizes must be positive")
    total = math.fsum(sizes)
    return [s / total for s in sizes]


def sum_rate_evaluator(qs: np.ndarray):
    def evaluate(h):
        return logdet_eye_plus_batch(gram_batch(h, qs))
    return evaluate


def expected_sum_rate(profiles: Sequence[UserProfile], n_r: int, n_t: int,
                      mc: McSettings = McSettings()) -> McEstimate:
    """``E_H log det(I + sum_t H_t Q_t H_t^H)``, one channel use per trial."""
    if not profiles:
        return McEstimate(0.0, 0.0, max(mc.trials, 2), mc.seed)
    qs = np.stack([p.covariance for p in profiles])
    return montecarlo.estimate(sum_rate_evaluator(qs), profiles, n_r, n_t, mc.trials, mc.seed,
                               workers=mc.workers, stream=mc.stream)


def asymptotic_sum_rate(profiles: Sequence[UserProfile], n_r: int) -> float:
    """``N_R log(1 + sum_t beta_t Tr(Q_t))``."""
    return n_r * math.log1p(effective_sum_power(profiles))


def relative_gap(mc_rate: float, asymptotic: float) -> float:
    return abs(mc_rate - asymptotic) / asymptotic if asymptotic > 0 else 0.0


def message_length_rates(allocation: RateAllocation, sum_rate: float) -> list[float]:
    """``R_k = c_k * sum_rate`` (nats per codeword)."""
    if sum_rate < 0:
        raise ValidationError("sum rate must be non-negative")
    return [c * sum_rate for c in allocation.c]
