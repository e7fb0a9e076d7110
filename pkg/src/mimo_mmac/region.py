"""Finite-dimension message-length region: feasibility under the sum-rate budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class RegionQuery:
    """Groups of ``(K_j, V_j)``: K_j users each sending V_j nats per codeword."""

    groups: tuple[tuple[int, float], ...]
    n: int

    def __post_init__(self):
        groups = tuple((int(k), float(v)) for k, v in self.groups)
        for k, v in groups:
            if k < 0:
                raise ValidationError(f"group size must be >= 0, got {k}")
            if not v > 0:
                raise ValidationError(f"message length must be positive, got {v}")
        if self.n < 1:
            raise ValidationError("codelength must be >= 1")
        object.__setattr__(self, "groups", groups)

    @property
    def users(self) -> int:
        return sum(k for k, _ in self.groups)

    def demand(self) -> float:
        return math.fsum(k * v for k, v in self.groups)


def region_feasible(query: RegionQuery, sum_rate_per_use: float) -> tuple[bool, float]:
    """Boundary points count as feasible (the region is closed)."""
    if sum_rate_per_use < 0:
        raise ValidationError("sum rate must be non-negative")
    slack = query.n * sum_rate_per_use - query.demand()
    return slack >= 0, slack


def max_sustainable_users(v: float, n: int, sum_rate_per_use: float) -> int:
    """Largest K with ``K * v <= n * sum_rate_per_use``."""
    if not v > 0:
        raise ValidationError("message length must be positive")
    if sum_rate_per_use < 0:
        raise ValidationError("sum rate must be non-negative")
    budget = n * sum_rate_per_use
    k = math.floor(budget / v)
    # the division can land one off the exact product test used for feasibility
    while (k + 1) * v <= budget:
        k += 1
    while k > 0 and k * v > budget:
        k -= 1
    return k


def symmetric_query(rates: Sequence[float], n: int) -> RegionQuery:
    """Group equal per-user rates into a query."""
    counts: dict[float, int] = {}
    for r in rates:
        counts[r] = counts.get(r, 0) + 1
    return RegionQuery(tuple((k, v) for v, k in counts.items()), n)
