"""Experiment runners behind the CLI subcommands.

Every runner returns a :class:`Table`; rows follow grid order, and every
random quantity is derived from the scenario seed and the grid position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, streams
from .channel import sample_user_profiles
from .csvio import Table
from .errors import ConfigurationError, ValidationError
from .exponents import (canonical_event, event_error_bound, exponent_point, k_e_for_rule,
                        lemma1_case1_lower_bound, lemma1_rates, observed_c0, total_error_bound)
from .hardening import loglog_slope, median_report
from .montecarlo import McSettings
from .rates import RateAllocation, asymptotic_sum_rate, expected_sum_rate, relative_gap
from .region import RegionQuery, max_sustainable_users, region_feasible
from .scenario import Scenario


def metadata(command: str, scenario: Scenario, **extra) -> dict:
    meta = {
        "tool": f"mimo-mmac {__version__}",
        "command": command,
        "seed": scenario.seed,
        "scenario_hash": scenario.digest(),
        "units": "nats",
        "distance_law": scenario.fading.distance_law,
        "shadowing": "log-normal, dB-domain std",
    }
    meta.update(extra)
    return meta


def population(scenario: Scenario, n: int, index: int, n_t: int):
    """Users for codelength ``n``; identical large-scale factors for any ``n_t``."""
    rng = streams.generator(scenario.seed, streams.PROFILES, n, index)
    return sample_user_profiles(scenario.k_n(n), scenario.fading, scenario.power_range, rng, n_t)


def channel_seed(scenario: Scenario, *tags: int) -> int:
    return streams.derive_seed(scenario.seed, streams.CHANNEL, *tags) & streams.MASK64


def _rate_settings(scenario, workers, *tags) -> McSettings:
    return McSettings(scenario.mc.rate_trials, channel_seed(scenario, *tags), workers)


def run_rate(scenario: Scenario, workers: int | None = None) -> Table:
    header = ["n", "k_n", "N_T", "N_R", "population", "sum_rate", "std_error",
              "asymptotic_sum_rate", "relative_gap", "per_user_rate", "seed"]
    table = Table(header, metadata=metadata("rate", scenario, trials=scenario.mc.rate_trials),
                  rate_columns=("sum_rate", "std_error", "asymptotic_sum_rate", "per_user_rate"))
    for n in scenario.n_values:
        k_n = scenario.k_n(n)
        for p in range(scenario.mc.populations):
            users = population(scenario, n, p, scenario.n_t)
            est = expected_sum_rate(users, scenario.n_r, scenario.n_t,
                                    _rate_settings(scenario, workers, 0, n, p, scenario.n_t, scenario.n_r))
            asym = asymptotic_sum_rate(users, scenario.n_r)
            per_user = RateAllocation.symmetric(n, k_n).c[0] * est.mean
            table.rows.append([n, k_n, scenario.n_t, scenario.n_r, p, est.mean, est.std_error,
                               asym, relative_gap(est.mean, asym), per_user, scenario.seed])
    return table


def run_fig2(scenario: Scenario, workers: int | None = None) -> Table:
    """Sum rate against codelength for each antenna configuration."""
    header = ["n", "k_n", "N_T", "N_R", "mc_sum_rate", "mc_std_error", "asymptotic_sum_rate",
              "relative_gap", "seed", "population"]
    table = Table(header, metadata=metadata("fig2", scenario, trials=scenario.mc.rate_trials),
                  rate_columns=("mc_sum_rate", "mc_std_error", "asymptotic_sum_rate"))
    for n in scenario.n_values:
        k_n = scenario.k_n(n)
        for n_t, n_r in scenario.antenna_configs:
            for p in range(scenario.mc.populations):
                users = population(scenario, n, p, n_t)
                est = expected_sum_rate(users, n_r, n_t, _rate_settings(scenario, workers, 0, n, p, n_t, n_r))
                asym = asymptotic_sum_rate(users, n_r)
                table.rows.append([n, k_n, n_t, n_r, est.mean, est.std_error, asym,
                                   relative_gap(est.mean, asym), scenario.seed, p])
    return table


def linear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares (slope, intercept, R^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def run_fig3(scenario: Scenario, workers: int | None = None, bits: bool = False) -> Table:
    """Sum rate against the receive antenna count at fixed ``N_T``.

    The trailer carries one least-squares fit per codelength (omitted when
    only one ``N_R`` is swept).
    """
    n_t = scenario.n_t
    header = ["n", "k_n", "N_T", "N_R", "mc_sum_rate", "mc_std_error", "asymptotic_sum_rate",
              "seed", "population"]
    table = Table(header, metadata=metadata("fig3", scenario, trials=scenario.mc.rate_trials),
                  rate_columns=("mc_sum_rate", "mc_std_error", "asymptotic_sum_rate"))
    unit = math.log(2) if bits else 1.0
    for n in scenario.n_values:
        k_n = scenario.k_n(n)
        for p in range(scenario.mc.populations):
            users = population(scenario, n, p, n_t)
            xs, ys = [], []
            for n_r in scenario.n_r_values:
                est = expected_sum_rate(users, n_r, n_t, _rate_settings(scenario, workers, 0, n, p, n_t, n_r))
                table.rows.append([n, k_n, n_t, n_r, est.mean, est.std_error,
                                   asymptotic_sum_rate(users, n_r), scenario.seed, p])
                xs.append(n_r)
                ys.append(est.mean / unit)
            if len(set(xs)) > 1:
                slope, intercept, r2 = linear_fit(xs, ys)
                table.footer.append(
                    f"fit,n={n},population={p},slope={slope:.17g},intercept={intercept:.17g},r_squared={r2:.17g}")
    return table


def run_exponent_sweep(scenario: Scenario, workers: int | None = None) -> Table:
    """Per-use exponents with back-off rates over (n, event rule, rho, epsilon)."""
    n_t, n_r = scenario.n_t, scenario.n_r
    header = ["n", "k_n", "k_e", "gamma", "event_rule", "rho", "epsilon", "N_T", "N_R", "population",
              "sum_rate", "e0", "e0_std_error", "per_use_exponent", "per_use_std_error",
              "lemma1_lower_bound", "event_log_exponent", "event_error_bound", "total_error_bound", "seed"]
    table = Table(header, rate_columns=("sum_rate",))
    estimates = []
    for n in scenario.n_values:
        k_n = scenario.k_n(n)
        alloc = RateAllocation.symmetric(n, k_n)
        for p in range(scenario.mc.populations):
            users = population(scenario, n, p, n_t)
            sum_rate = expected_sum_rate(users, n_r, n_t, _rate_settings(scenario, workers, 0, n, p, n_t, n_r)).mean
            for r_i, rule in enumerate(scenario.event_rules):
                k_e = k_e_for_rule(rule.rule, n, k_n, rule.value)
                event = canonical_event(users, k_e)
                gamma = k_e / k_n
                for rho_i, rho in enumerate(scenario.rho_values):
                    mc = McSettings(scenario.mc.exponent_trials,
                                    channel_seed(scenario, 1, n, p, r_i, rho_i), workers)
                    for eps in scenario.epsilon_values:
                        rates = lemma1_rates(alloc, sum_rate, eps)
                        point, e0, e_r = exponent_point(rho, event, rates, n, k_n, users, n_r, n_t, mc)
                        bound = event_error_bound(rho, event, rates, n, users, n_r, n_t, mc, e0=e0)
                        lower = lemma1_case1_lower_bound(eps, gamma, k_n, n, users, n_r, event)
                        if rho > 0:
                            estimates.append(e_r)
                        table.rows.append([n, k_n, k_e, gamma, rule.label, rho, eps, n_t, n_r, p, sum_rate,
                                           e0.mean, e0.std_error, e_r.mean, e_r.std_error, lower,
                                           bound.exponent, bound.bound, None, scenario.seed])
    c0 = observed_c0(estimates) if estimates else math.nan
    col = header.index("total_error_bound")
    for row in table.rows:
        row[col] = total_error_bound(row[1], row[0], c0) if c0 > 0 else math.nan
    table.metadata = metadata("exponent", scenario, trials=scenario.mc.exponent_trials, c0=c0)
    return table


def run_hardening(scenario: Scenario, workers: int | None = None) -> Table:
    """Median concentration statistics over independent populations and draws."""
    n_t, n_r = scenario.n_t, scenario.n_r
    draws = scenario.mc.hardening_draws
    header = ["n", "k_n", "N_T", "N_R", "draws", "median_offdiag_ratio", "median_det_gap",
              "median_det_gap_half", "seed"]
    table = Table(header, metadata=metadata("hardening", scenario, draws=draws))
    ks, ratios = [], []
    for n in scenario.n_values:
        report, half = median_report(
            lambda d: population(scenario, n, 1000 + d, n_t), n_r, n_t,
            lambda d: streams.generator(scenario.seed, streams.HARDENING, n, d), draws)
        table.rows.append([n, report.k_n, n_t, n_r, draws, report.offdiag_ratio, report.det_gap,
                           half, scenario.seed])
        ks.append(report.k_n)
        ratios.append(report.offdiag_ratio)
    if len(set(ks)) > 1 and all(r > 0 for r in ratios):
        table.footer.append(f"offdiag_loglog_slope={loglog_slope(ks, ratios):.17g}")
    return table


@dataclass(frozen=True)
class ParsedQuery:
    line: int
    query: RegionQuery
    sum_rate: float


_TOKEN = re.compile(r"^(n|rate|group)=(.+)$")


def parse_region_file(text: str) -> list[ParsedQuery]:
    """One query per line: ``n=<int> rate=<nats/use> [group=<K>:<V> ...]``.

    Blank lines and ``#`` comments are ignored.
    """
    queries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        n = rate = None
        groups = []
        try:
            for token in line.split():
                m = _TOKEN.match(token)
                if not m:
                    raise ValueError(f"unrecognized token {token!r}")
                key, value = m.groups()
                if key == "n":
                    n = int(value)
                elif key == "rate":
                    rate = float(value)
                else:
                    k, _, v = value.partition(":")
                    groups.append((int(k), float(v)))
            if n is None or rate is None:
                raise ValueError("both n= and rate= are required")
            if not math.isfinite(rate) or rate < 0:
                raise ValueError("rate must be a finite non-negative number")
            queries.append(ParsedQuery(lineno, RegionQuery(tuple(groups), n), rate))
        except (ValueError, ConfigurationError, ValidationError) as exc:
            raise ConfigurationError(f"line {lineno}: {exc}") from None
    return queries


def query_region(queries: list[ParsedQuery]) -> tuple[Table, list[str]]:
    header = ["query", "line", "n", "sum_rate_per_use", "demand", "slack", "feasible",
              "group", "users", "length", "max_sustainable_users"]
    table = Table(header, metadata={"tool": f"mimo-mmac {__version__}", "command": "region",
                                    "units": "nats"},
                  rate_columns=("sum_rate_per_use", "demand", "slack", "length"))
    report = []
    for i, q in enumerate(queries):
        feasible, slack = region_feasible(q.query, q.sum_rate)
        base = [i, q.line, q.query.n, q.sum_rate, q.query.demand(), slack, feasible]
        report.append(f"query {i} (line {q.line}): {'feasible' if feasible else 'infeasible'}, "
                      f"slack {slack:.6g} nats")
        if not q.query.groups:
            table.rows.append(base + [None, None, None, None])
        for j, (k, v) in enumerate(q.query.groups):
            kmax = max_sustainable_users(v, q.query.n, q.sum_rate)
            table.rows.append(base + [j, k, v, kmax])
            report.append(f"  group {j}: K={k} V={v:.6g} max sustainable users {kmax}")
    return table, report


PLOT_STUB = '''"""Plot {name} data written by mimo-mmac. Requires pandas and matplotlib."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else {csv!r}
df = pd.read_csv(path, comment="#")
x = {x!r}
for key, grp in df.groupby({group!r}):
    grp = grp.groupby(x, as_index=False).mean(numeric_only=True)
    plt.plot(grp[x], grp["mc_sum_rate"], "o-", label=f"{{key}} Monte-Carlo")
    if "asymptotic_sum_rate" in grp:
        plt.plot(grp[x], grp["asymptotic_sum_rate"], "--", label=f"{{key}} asymptotic")
plt.xlabel(x)
plt.ylabel("sum rate")
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_plot_stub(command: str, csv_path: Path) -> Path:
    if command == "fig2":
        x, group = "n", ["N_T", "N_R"]
    else:
        x, group = "N_R", "n"
    stub = csv_path.with_name(csv_path.stem + "_plot.py")
    stub.write_text(PLOT_STUB.format(name=command, csv=str(csv_path), x=x, group=group))
    return stub
