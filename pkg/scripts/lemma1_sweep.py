"""Error-exponent sweep for linear (gamma=0.5) and sublinear error-event sizes.

Usage: python scripts/lemma1_sweep.py [OUT.csv]
"""

import sys

from mimo_mmac.cli import main
from mimo_mmac.scenario import EventRule, Scenario, dump_scenario

out = sys.argv[1] if len(sys.argv) > 1 else "lemma1.csv"
scenario = Scenario(
    n_values=(256, 512, 1024, 2048),
    rho_values=(0.25, 0.5, 1.0),
    epsilon_values=(0.05, 0.1, 0.2),
    event_rules=(EventRule("gamma", 0.5), EventRule("gamma", 0.25), EventRule("n_over_log_n", None),
                 EventRule("sqrt_n", None)),
)
dump_scenario(scenario, out + ".scenario.json")
sys.exit(main(["exponent", "--scenario", out + ".scenario.json", "--out", out]))
