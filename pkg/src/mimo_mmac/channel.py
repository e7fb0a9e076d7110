"""Geometry, large-scale fading and per-channel-use Rayleigh draws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ValidationError
from .numerics import check_hermitian_psd

POWER_SLACK = 1e-6  # delta in the trace constraint, relative to P_k


@dataclass(frozen=True)
class FadingParams:
    """Large-scale fading model.

    ``reference_distance`` is the distance (m) at which the mean path gain is
    one, so ``beta = z / (r / reference_distance) ** eta``. Distances are drawn
    uniformly in ``[r_min, r_max]``; ``r_min == r_max`` pins every user.
    """

    path_loss_exponent: float = 3.8
    shadow_std_db: float = 8.0
    r_min: float = 100.0
    r_max: float = 1000.0
    reference_distance: float = 1.0
    distance_law: str = "uniform"
    shadow_base: str = "db"

    def __post_init__(self):
        if not self.path_loss_exponent > 0:
            raise ConfigurationError("path loss exponent must be positive")
        if not self.shadow_std_db >= 0:
            raise ConfigurationError("shadowing std must be non-negative")
        if not 0 < self.r_min <= self.r_max:
            raise ConfigurationError(f"need 0 < r_min <= r_max, got [{self.r_min}, {self.r_max}]")
        if not self.reference_distance > 0:
            raise ConfigurationError("reference distance must be positive")
        if self.distance_law != "uniform":
            raise ConfigurationError(f"unsupported distance law {self.distance_law!r}")
        if self.shadow_base != "db":
            raise ConfigurationError(f"unsupported shadowing base {self.shadow_base!r}")

    def beta(self, distance, shadow):
        return shadow / (np.asarray(distance) / self.reference_distance) ** self.path_loss_exponent


# Numerical-results setup: distances in km so that a cell-edge user with
# unit shadowing sees an SNR equal to its transmit power.
SECTION6_FADING = FadingParams(3.8, 8.0, 100.0, 1000.0, reference_distance=1000.0)
SECTION6_POWER = (5.0, 15.0)


@dataclass(frozen=True)
class UserProfile:
    index: int
    distance: float
    shadow: float
    beta: float
    power: float
    covariance: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        q = check_hermitian_psd(self.covariance, f"Q_{self.index}")
        object.__setattr__(self, "covariance", q)
        if self.beta < 0 or not math.isfinite(self.beta):
            raise ValidationError(f"user {self.index}: beta must be finite and >= 0")
        tr = float(np.real(np.trace(q)))
        slack = POWER_SLACK * self.power
        if not (self.power - slack - 1e-12 * self.power <= tr <= self.power * (1 + 1e-12)):
            raise ValidationError(
                f"user {self.index}: Tr(Q)={tr} outside [{self.power - slack}, {self.power}]")

    @property
    def n_t(self) -> int:
        return self.covariance.shape[0]

    @property
    def received_power(self) -> float:
        """``beta * Tr(Q)``."""
        return self.beta * float(np.real(np.trace(self.covariance)))


@dataclass(frozen=True)
class ChannelDraw:
    """One channel use: ``matrices[k]`` is the N_R x N_T matrix of user k."""

    matrices: np.ndarray

    def __post_init__(self):
        if self.matrices.ndim != 3:
            raise ConfigurationError("channel draw must have shape (k, n_r, n_t)")
        if not np.all(np.isfinite(self.matrices)):
            raise ValidationError("channel draw has non-finite entries")

    def __len__(self):
        return self.matrices.shape[0]

    def __getitem__(self, k):
        return self.matrices[k]


def isotropic(power: float, n_t: int) -> np.ndarray:
    return np.eye(n_t, dtype=np.complex128) * (power / n_t)


def make_profile(index, distance, shadow, power, params: FadingParams, n_t=1) -> UserProfile:
    return UserProfile(index, float(distance), float(shadow), float(params.beta(distance, shadow)),
                       float(power), isotropic(power, n_t))


def sample_user_profiles(count: int, params: FadingParams, power_range: Sequence[float],
                         rng: np.random.Generator, n_t: int = 1) -> list[UserProfile]:
    """Draw ``count`` independent users.

    Random draws are made in a fixed order (distances, shadowing, powers), so
    the same generator state yields the same large-scale factors for any
    ``n_t``.
    """
    if count < 0:
        raise ConfigurationError("user count must be non-negative")
    lo, hi = map(float, power_range)
    if not 0 < lo <= hi:
        raise ConfigurationError(f"invalid power range [{lo}, {hi}]")
    if n_t < 1:
        raise ConfigurationError("n_t must be >= 1")
    r = rng.uniform(params.r_min, params.r_max, count)
    z = 10.0 ** (params.shadow_std_db * rng.standard_normal(count) / 10.0)
    p = rng.uniform(lo, hi, count)
    return [make_profile(k, r[k], z[k], p[k], params, n_t) for k in range(count)]


def with_transmit_antennas(profiles: Sequence[UserProfile], n_t: int) -> list[UserProfile]:
    """Same users with isotropic covariances on ``n_t`` antennas (same traces)."""
    return [replace(p, covariance=isotropic(p.power, n_t)) for p in profiles]


def stack_profiles(profiles: Sequence[UserProfile]) -> tuple[np.ndarray, np.ndarray]:
    """Return (betas, covariances) as arrays of shape (k,) and (k, n_t, n_t)."""
    if not profiles:
        raise ConfigurationError("no users")
    n_t = profiles[0].n_t
    if any(p.n_t != n_t for p in profiles):
        raise ConfigurationError("users have different transmit antenna counts")
    betas = np.array([p.beta for p in profiles])
    qs = np.stack([p.covariance for p in profiles])
    return betas, qs


def draw_fading(betas: np.ndarray, n_r: int, n_t: int, rng: np.random.Generator) -> np.ndarray:
    """Entries ``alpha * sqrt(beta_k)`` with alpha ~ CN(0, 1), shape (k, n_r, n_t)."""
    x = rng.standard_normal((betas.shape[0], n_r, n_t, 2))
    alpha = (x[..., 0] + 1j * x[..., 1]) * math.sqrt(0.5)
    return alpha * np.sqrt(betas)[:, None, None]


def draw_channel(profiles: Sequence[UserProfile], n_r: int, n_t: int,
                 rng: np.random.Generator) -> ChannelDraw:
    if n_r < 1 or n_t < 1:
        raise ConfigurationError("antenna counts must be >= 1")
    betas, qs = stack_profiles(profiles)
    if qs.shape[1] != n_t:
        raise ConfigurationError(f"users have {qs.shape[1]} transmit antennas, expected {n_t}")
    return ChannelDraw(draw_fading(betas, n_r, n_t, rng))


def effective_sum_power(profiles: Sequence[UserProfile]) -> float:
    """``sum_t beta_t Tr(Q_t)``."""
    return math.fsum(p.received_power for p in profiles)


def power_extremes(profiles: Sequence[UserProfile]) -> tuple[float, float]:
    """Population (min, max) of ``beta_k Tr(Q_k)``."""
    rp = [p.received_power for p in profiles]
    return min(rp), max(rp)
