"""Seeded Monte-Carlo expectations over channel draws.

Trial ``t`` always uses the Philox substream ``(key(master_seed), t)``, and
within a trial users consume the stream in index order. Trials are grouped
into blocks whose size depends only on the problem shape, so the per-trial
values, and therefore every estimate, are identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import streams
from .channel import ChannelDraw, UserProfile, draw_fading, stack_profiles
from .errors import ConfigurationError, TrialError

WORKERS_ENV = "MMAC_WORKERS"
_BLOCK_ELEMENTS = 1 << 20

DEFAULT_RATE_TRIALS = 2000
DEFAULT_EXPONENT_TRIALS = 10000


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    master_seed: int

    def __post_init__(self):
        if self.trials < 2:
            raise ConfigurationError("an estimate needs at least 2 trials")


@dataclass(frozen=True)
class McSettings:
    trials: int = DEFAULT_RATE_TRIALS
    seed: int = 0
    workers: int | None = None
    stream: int = streams.CHANNEL


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return 1
    try:
        n = int(value)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None
    if n < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be >= 1")
    return n


def summarize(values: np.ndarray, master_seed: int) -> McEstimate:
    """Mean and standard error with compensated summation."""
    n = len(values)
    if n < 2:
        raise ConfigurationError("an estimate needs at least 2 trials")
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n, master_seed)


def sample(evaluator: Callable, profiles: Sequence[UserProfile], n_r: int, n_t: int,
           trials: int, master_seed: int, *, workers: int | None = None,
           stream: int = streams.CHANNEL, batched: bool = True) -> np.ndarray:
    """Evaluate ``evaluator`` on ``trials`` independent channel draws.

    With ``batched`` the evaluator maps an array of shape
    (b, k, n_r, n_t) to b values; otherwise it receives one ChannelDraw.
    Returns the per-trial values in trial order.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    betas, qs = stack_profiles(profiles)
    if qs.shape[1] != n_t:
        raise ConfigurationError(f"users have {qs.shape[1]} transmit antennas, expected {n_t}")
    key = streams.derive_seed(master_seed)
    per_trial = betas.shape[0] * n_r * n_t
    block = max(1, min(trials, _BLOCK_ELEMENTS // max(per_trial, 1)))
    starts = list(range(0, trials, block))

    def run(start: int) -> np.ndarray:
        stop = min(start + block, trials)
        hs = np.stack([draw_fading(betas, n_r, n_t, streams.trial_generator(key, t, stream))
                       for t in range(start, stop)])
        if batched:
            out = np.asarray(evaluator(hs), dtype=float).reshape(stop - start)
        else:
            out = np.array([float(evaluator(ChannelDraw(h))) for h in hs])
        bad = np.flatnonzero(~np.isfinite(out))
        if bad.size:
            raise TrialError(start + int(bad[0]), float(out[bad[0]]))
        return out

    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    if workers == 1 or len(starts) == 1:
        parts = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    return np.concatenate(parts)


def estimate(evaluator: Callable, profiles: Sequence[UserProfile], n_r: int, n_t: int,
             trials: int, master_seed: int, *, workers: int | None = None,
             stream: int = streams.CHANNEL, batched: bool = True) -> McEstimate:
    """Monte-Carlo estimate of ``E_H[evaluator(H)]``."""
    if trials < 2:
        raise ConfigurationError("an estimate needs at least 2 trials")
    values = sample(evaluator, profiles, n_r, n_t, trials, master_seed,
                    workers=workers, stream=stream, batched=batched)
    return summarize(values, master_seed)
