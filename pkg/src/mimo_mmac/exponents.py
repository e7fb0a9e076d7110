"""Gallager-type error exponents and the achievability-side bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from . import montecarlo, streams
from .channel import UserProfile, effective_sum_power, power_extremes
from .errors import ConfigurationError, ValidationError
from .montecarlo import McEstimate, McSettings
from .numerics import gram_batch, logdet_eye_plus_batch
from .rates import RateAllocation, message_length_rates

EXPONENT_SETTINGS = McSettings(trials=montecarlo.DEFAULT_EXPONENT_TRIALS, stream=streams.CHANNEL)


@dataclass(frozen=True)
class ErrorEvent:
    """Users ``A_l`` that are decoded in error (0-based indices)."""

    users: tuple[int, ...]

    def __post_init__(self):
        users = tuple(sorted(set(int(u) for u in self.users)))
        if not users:
            raise ValidationError("an error event needs at least one user")
        if users[0] < 0:
            raise ValidationError("user indices must be non-negative")
        object.__setattr__(self, "users", users)

    @property
    def k_e(self) -> int:
        return len(self.users)

    def check(self, k_n: int):
        if self.users[-1] >= k_n:
            raise ValidationError(f"event refers to user {self.users[-1]} but k_n={k_n}")


@dataclass(frozen=True)
class ExponentPoint:
    rho: float
    e0: float
    e_r: float
    gamma: float


class ErrorBound(NamedTuple):
    bound: float      # clipped to [0, 1]
    exponent: float   # n E^l(rho) - rho sum R_k; bound = exp(-exponent)


def canonical_event(profiles: Sequence[UserProfile], k_e: int) -> ErrorEvent:
    """The ``k_e`` users with the largest ``beta Tr(Q)`` (ties to lower index)."""
    if not 1 <= k_e <= len(profiles):
        raise ValidationError(f"k_e={k_e} out of range for {len(profiles)} users")
    order = sorted(range(len(profiles)), key=lambda k: (-profiles[k].received_power, k))
    return ErrorEvent(tuple(order[:k_e]))


def k_e_for_rule(rule: str, n: int, k_n: int, value: float | None = None) -> int:
    """Error-event size: ``gamma`` (fraction of k_n), ``n_over_log_n`` or ``sqrt_n``."""
    if rule == "gamma":
        if value is None or not 0 < value <= 1:
            raise ValidationError("gamma rule needs a value in (0, 1]")
        k_e = math.ceil(value * k_n - 1e-9)
    elif rule == "n_over_log_n":
        k_e = math.ceil(n / math.log(n))
    elif rule == "sqrt_n":
        k_e = math.ceil(math.sqrt(n))
    elif rule == "count":
        k_e = int(value)
    else:
        raise ConfigurationError(f"unknown event rule {rule!r}")
    return max(1, min(k_e, k_n))


def _check_rho(rho: float):
    if not 0 <= rho <= 1:
        raise ValidationError(f"rho must lie in [0, 1], got {rho}")


def gallager_e0(rho: float, event: ErrorEvent, profiles: Sequence[UserProfile], n_r: int,
                n_t: int, mc: McSettings = EXPONENT_SETTINGS) -> McEstimate:
    """``-log E_H det(I + G_A / (1 + rho))^(-rho)`` for the users in ``event``.

    The average of the determinant powers is taken in the log domain; the
    standard error is propagated to the logarithm by the delta method.
    """
    _check_rho(rho)
    event.check(len(profiles))
    if rho == 0:
        return McEstimate(0.0, 0.0, mc.trials, mc.seed)
    members = [profiles[k] for k in event.users]
    if all(p.beta == 0 for p in members):
        return McEstimate(0.0, 0.0, mc.trials, mc.seed)
    qs = np.stack([p.covariance for p in members])
    scale = 1.0 / (1.0 + rho)

    def evaluate(h):
        return -rho * logdet_eye_plus_batch(gram_batch(h, qs), scale)

    logs = montecarlo.sample(evaluate, members, n_r, n_t, mc.trials, mc.seed,
                             workers=mc.workers, stream=mc.stream)
    trials = len(logs)
    log_mean = float(logsumexp(logs)) - math.log(trials)
    # relative fluctuation of the determinant powers around their mean
    w = np.exp(logs - log_mean)
    rel_se = math.sqrt(math.fsum((w - 1.0) ** 2) / (trials - 1) / trials)
    return McEstimate(-log_mean, rel_se, trials, mc.seed)


def binary_entropy(p: float) -> float:
    """``-p log p - (1-p) log(1-p)`` in nats, with ``0 log 0 = 0``."""
    if not 0 <= p <= 1:
        raise ValidationError(f"probability must lie in [0, 1], got {p}")
    h = 0.0
    if p > 0:
        h -= p * math.log(p)
    if p < 1:
        h -= (1 - p) * math.log1p(-p)
    return h


def log_binomial(k_n: int, k_e: int) -> float:
    return math.lgamma(k_n + 1) - math.lgamma(k_e + 1) - math.lgamma(k_n - k_e + 1)


def binomial_entropy_bound_holds(k_n: int, k_e: int) -> tuple[bool, float]:
    """Check ``log C(k_n, k_e) <= k_n H_2(k_e / k_n)``; returns (holds, slack)."""
    if k_n < 1 or not 0 <= k_e <= k_n:
        raise ValidationError(f"need 0 <= k_e <= k_n and k_n >= 1, got ({k_n}, {k_e})")
    slack = k_n * binary_entropy(k_e / k_n) - log_binomial(k_n, k_e)
    # lgamma rounding can leave an exact-zero slack slightly negative
    return slack >= -1e-9 * max(1.0, k_n), slack


def lemma1_rates(allocation: RateAllocation, sum_rate: float, epsilon: float) -> list[float]:
    """Back-off rates ``(1 - epsilon) c_k E log det(I + sum G)``."""
    if not 0 <= epsilon <= 1:
        raise ValidationError("epsilon must lie in [0, 1]")
    return message_length_rates(allocation, (1.0 - epsilon) * sum_rate)


def _event_rate(event: ErrorEvent, rates: Sequence[float]) -> float:
    if len(rates) <= event.users[-1]:
        raise ValidationError("rates do not cover every user in the event")
    return math.fsum(rates[k] for k in event.users)


def per_use_exponent(rho: float, event: ErrorEvent, rates: Sequence[float], n: int, k_n: int,
                     profiles: Sequence[UserProfile], n_r: int, n_t: int,
                     mc: McSettings = EXPONENT_SETTINGS) -> McEstimate:
    """``E^l(rho) - (rho/n) sum_{A_l} R_k - (k_n/n) H_2(k_e/k_n)``."""
    e0 = gallager_e0(rho, event, profiles, n_r, n_t, mc)
    penalty = rho / n * _event_rate(event, rates) + k_n / n * binary_entropy(event.k_e / k_n)
    return McEstimate(e0.mean - penalty, e0.std_error, e0.trials, e0.master_seed)


def exponent_point(rho: float, event: ErrorEvent, rates: Sequence[float], n: int, k_n: int,
                   profiles: Sequence[UserProfile], n_r: int, n_t: int,
                   mc: McSettings = EXPONENT_SETTINGS) -> tuple[ExponentPoint, McEstimate, McEstimate]:
    e0 = gallager_e0(rho, event, profiles, n_r, n_t, mc)
    penalty = rho / n * _event_rate(event, rates) + k_n / n * binary_entropy(event.k_e / k_n)
    e_r = McEstimate(e0.mean - penalty, e0.std_error, e0.trials, e0.master_seed)
    return ExponentPoint(rho, e0.mean, e_r.mean, event.k_e / k_n), e0, e_r


def lemma1_case1_lower_bound(epsilon: float, gamma: float, k_n: int, n: int,
                             profiles: Sequence[UserProfile], n_r: int,
                             event: ErrorEvent | None = None) -> float:
    """Closed-form lower bound on ``E_r(1, gamma)`` for linearly many errors.

    ``P_min - delta`` is the smallest ``beta Tr(Q)`` inside the event and
    ``P_max`` the largest over all users.
    """
    if not 0 < epsilon < 1:
        raise ValidationError("epsilon must lie in (0, 1)")
    if not 0 < gamma <= 1:
        raise ValidationError("gamma must lie in (0, 1]")
    if event is None:
        event = canonical_event(profiles, k_e_for_rule("gamma", n, k_n, gamma))
    event.check(len(profiles))
    p_min = min(profiles[k].received_power for k in event.users)
    p_max = power_extremes(profiles)[1]
    s = effective_sum_power(profiles)
    return (epsilon * n_r * math.log1p(s) - k_n / n
            + n_r * (math.log1p(0.5 * gamma * k_n * p_min) - math.log1p(k_n * p_max)))


def event_error_bound(rho: float, event: ErrorEvent, rates: Sequence[float], n: int,
                      profiles: Sequence[UserProfile], n_r: int, n_t: int,
                      mc: McSettings = EXPONENT_SETTINGS, e0: McEstimate | None = None) -> ErrorBound:
    """``exp(-[n E^l(rho) - rho sum_{A_l} R_k])`` clipped to [0, 1].

    A precomputed ``e0`` for the same (rho, event) may be passed in.
    """
    _check_rho(rho)
    if e0 is None:
        e0 = gallager_e0(rho, event, profiles, n_r, n_t, mc)
    exponent = n * e0.mean - rho * _event_rate(event, rates)
    return ErrorBound(min(1.0, math.exp(-exponent)) if exponent > -700 else 1.0, exponent)


def total_error_bound(k_n: int, n: int, c0: float) -> float:
    """``k_n exp(-n c0)``."""
    if not c0 > 0:
        raise ValidationError("c0 must be positive")
    return k_n * math.exp(-n * c0)


def observed_c0(estimates: Sequence[McEstimate]) -> float:
    """Smallest ``mean - 3 std_error`` over a grid of per-use exponents."""
    return min(e.mean - 3.0 * e.std_error for e in estimates)
