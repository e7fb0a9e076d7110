"""Regenerate the sum-rate-vs-codelength and sum-rate-vs-N_R datasets.

Usage: python scripts/reproduce_figures.py [OUTDIR] [--workers N]
Writes fig2.csv, fig3.csv (plus plotting stubs) and hardening.csv.
"""

import argparse
import sys
from pathlib import Path

from mimo_mmac.cli import main
from mimo_mmac.scenario import McConfig, Scenario, dump_scenario

parser = argparse.ArgumentParser()
parser.add_argument("outdir", nargs="?", default="results", type=Path)
parser.add_argument("--workers", default="1")
args = parser.parse_args()
args.outdir.mkdir(parents=True, exist_ok=True)

fig2 = Scenario(n_values=(64, 128, 256, 512, 1024, 2048))
fig3 = Scenario(n_values=(256, 1024, 2048), n_t=2, n_r_values=(2, 4, 8, 16))
hard = Scenario(n_values=tuple(2 ** j for j in range(7, 15)), mc=McConfig(hardening_draws=33))

for name, scenario in (("fig2", fig2), ("fig3", fig3), ("hardening", hard)):
    path = args.outdir / f"{name}_scenario.json"
    dump_scenario(scenario, path)
    code = main([name, "--scenario", str(path), "--out", str(args.outdir / f"{name}.csv"),
                 "--workers", args.workers])
    if code:
        sys.exit(code)
    print(f"wrote {args.outdir / (name + '.csv')}")
