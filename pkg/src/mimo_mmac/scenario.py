"""Experiment scenarios: a versioned JSON document with a strict schema.

Unknown keys are rejected. A minimal file only needs ``"version": 1``;
every other field falls back to the numerical-results defaults.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .channel import SECTION6_FADING, SECTION6_POWER, FadingParams
from .errors import ConfigurationError
from .montecarlo import DEFAULT_EXPONENT_TRIALS, DEFAULT_RATE_TRIALS
from .streams import MASK64

SCENARIO_VERSION = 1
EVENT_RULES = ("gamma", "n_over_log_n", "sqrt_n", "count")


@dataclass(frozen=True)
class UserRule:
    """``linear``: k_n = round(value * n); ``explicit``: k_n = value."""

    kind: str = "linear"
    value: float = 0.5

    def __post_init__(self):
        if self.kind == "linear":
            if not 0 < self.value <= 1:
                raise ConfigurationError(f"linear user ratio must lie in (0, 1], got {self.value}")
        elif self.kind == "explicit":
            if self.value != int(self.value) or self.value < 1:
                raise ConfigurationError(f"explicit user count must be a positive integer, got {self.value}")
        else:
            raise ConfigurationError(f"unknown user rule {self.kind!r}")

    def k_n(self, n: int) -> int:
        if self.kind == "explicit":
            return int(self.value)
        return max(1, int(round(self.value * n)))


@dataclass(frozen=True)
class EventRule:
    rule: str = "gamma"
    value: float | None = 0.5

    def __post_init__(self):
        if self.rule not in EVENT_RULES:
            raise ConfigurationError(f"unknown event rule {self.rule!r}")
        if self.rule in ("gamma", "count") and self.value is None:
            raise ConfigurationError(f"event rule {self.rule!r} needs a value")
        if self.rule == "gamma" and not 0 < self.value <= 1:
            raise ConfigurationError("gamma must lie in (0, 1]")

    @property
    def label(self) -> str:
        return self.rule if self.value is None else f"{self.rule}={self.value:g}"


@dataclass(frozen=True)
class McConfig:
    rate_trials: int = DEFAULT_RATE_TRIALS
    exponent_trials: int = DEFAULT_EXPONENT_TRIALS
    populations: int = 1
    hardening_draws: int = 33

    def __post_init__(self):
        if self.rate_trials < 2 or self.exponent_trials < 2:
            raise ConfigurationError("trial counts must be >= 2")
        if self.populations < 1 or self.hardening_draws < 1:
            raise ConfigurationError("populations and hardening draws must be >= 1")


@dataclass(frozen=True)
class Scenario:
    version: int = SCENARIO_VERSION
    seed: int = 2019
    n_values: tuple[int, ...] = (64, 256, 1024)
    user_rule: UserRule = UserRule()
    n_t: int = 2
    n_r: int = 2
    antenna_configs: tuple[tuple[int, int], ...] = ((2, 2), (4, 4), (8, 8))
    n_r_values: tuple[int, ...] = (2, 4, 8, 16)
    fading: FadingParams = SECTION6_FADING
    power_range: tuple[float, float] = SECTION6_POWER
    mc: McConfig = McConfig()
    rho_values: tuple[float, ...] = (1.0,)
    epsilon_values: tuple[float, ...] = (0.1,)
    event_rules: tuple[EventRule, ...] = (EventRule("gamma", 0.5), EventRule("n_over_log_n", None),
                                         EventRule("sqrt_n", None))

    def __post_init__(self):
        if self.version != SCENARIO_VERSION:
            raise ConfigurationError(f"unsupported scenario version {self.version}")
        if not 0 <= self.seed <= MASK64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        for name in ("n_values", "antenna_configs", "n_r_values", "rho_values",
                     "epsilon_values", "event_rules"):
            if not getattr(self, name):
                raise ConfigurationError(f"{name} must be non-empty")
        if any(n < 2 for n in self.n_values):
            raise ConfigurationError("codelengths must be >= 2")
        antennas = [self.n_t, self.n_r, *self.n_r_values, *(a for c in self.antenna_configs for a in c)]
        if any(a < 1 for a in antennas):
            raise ConfigurationError("antenna counts must be >= 1")
        if any(not 0 <= r <= 1 for r in self.rho_values):
            raise ConfigurationError("rho values must lie in [0, 1]")
        if any(not 0 < e < 1 for e in self.epsilon_values):
            raise ConfigurationError("epsilon values must lie in (0, 1)")
        lo, hi = self.power_range
        if not 0 < lo <= hi:
            raise ConfigurationError("invalid power range")

    def k_n(self, n: int) -> int:
        return self.user_rule.k_n(n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        d["antenna_configs"] = [list(c) for c in self.antenna_configs]
        d["n_r_values"] = list(self.n_r_values)
        d["power_range"] = list(self.power_range)
        d["rho_values"] = list(self.rho_values)
        d["epsilon_values"] = list(self.epsilon_values)
        d["event_rules"] = [asdict(r) for r in self.event_rules]
        return d

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def override(self, **changes) -> "Scenario":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _strict(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigurationError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {unknown}")
    return data


def _number_list(value, where, kind=float):
    if not isinstance(value, list):
        raise ConfigurationError(f"{where}: expected a list")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigurationError(f"{where}: bad entry {v!r}")
        if kind is int and v != int(v):
            raise ConfigurationError(f"{where}: expected integers, got {v!r}")
        out.append(kind(v))
    return tuple(out)


def scenario_from_dict(data: dict) -> Scenario:
    try:
        return _scenario_from_dict(data)
    except TypeError as exc:
        raise ConfigurationError(f"scenario: {exc}") from None


def _scenario_from_dict(data: dict) -> Scenario:
    data = dict(_strict(Scenario, data, "scenario"))
    if "version" not in data:
        raise ConfigurationError("scenario: missing 'version'")
    kw = {}
    for key, value in data.items():
        if key == "user_rule":
            kw[key] = UserRule(**_strict(UserRule, value, key))
        elif key == "fading":
            kw[key] = FadingParams(**_strict(FadingParams, value, key))
        elif key == "mc":
            kw[key] = McConfig(**_strict(McConfig, value, key))
        elif key == "event_rules":
            if not isinstance(value, list):
                raise ConfigurationError("event_rules: expected a list")
            kw[key] = tuple(EventRule(**_strict(EventRule, r, key)) for r in value)
        elif key == "antenna_configs":
            if not isinstance(value, list):
                raise ConfigurationError("antenna_configs: expected a list")
            configs = tuple(_number_list(c, key, int) for c in value)
            if any(len(c) != 2 for c in configs):
                raise ConfigurationError("antenna_configs: entries are [n_t, n_r] pairs")
            kw[key] = configs
        elif key in ("n_values", "n_r_values"):
            kw[key] = _number_list(value, key, int)
        elif key in ("power_range", "rho_values", "epsilon_values"):
            kw[key] = _number_list(value, key)
            if key == "power_range" and len(kw[key]) != 2:
                raise ConfigurationError("power_range: expected [low, high]")
        elif key in ("version", "seed", "n_t", "n_r"):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"{key}: expected an integer")
            kw[key] = value
    return Scenario(**kw)


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return scenario_from_dict(data)


def dump_scenario(scenario: Scenario, path: str | Path):
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2, sort_keys=True) + "\n")
