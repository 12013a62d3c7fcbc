"""
Deterministic, two-point and Monte Carlo SCUC on the six-bus fixture
====================================================================

The deterministic run keeps every load and the wind farm at its forecast.
The two-point run checks corrective feasibility at 2m = 8 points per hour;
the Monte Carlo run does the same on a reduced set of sampled days.
"""

# %%
import time

import numpy as np

from pescuc import cases
from pescuc.driver import solve_deterministic, solve_stochastic_mcs, solve_stochastic_tpe

case = cases.six_bus()
print(case.n_units, "units,", case.n_lines, "lines,", len(case.uncertain), "random inputs")

# %%
runs = {}
for name, solve in [("det", lambda: solve_deterministic(case)),
                    ("tpe", lambda: solve_stochastic_tpe(case)),
                    ("mcs S=50", lambda: solve_stochastic_mcs(case, 5000, 50, seed=7))]:
    t0 = time.perf_counter()
    runs[name] = solve()
    runs[name].wall_time = time.perf_counter() - t0

ref = runs["mcs S=50"].expected_cost
print("%-10s %12s %12s %9s %6s %8s" % ("method", "schedule", "expected", "rel.err%", "iters", "time s"))
for name, r in runs.items():
    print("%-10s %12.1f %12.1f %9.3f %6d %8.2f" % (
        name, r.schedule_cost, r.expected_cost, 100 * abs(r.expected_cost - ref) / ref,
        r.iterations, r.wall_time))

# %%
# commitment: rows are units, columns hours
for name, r in runs.items():
    print(name)
    print(r.schedule.commitment.astype(int))

# %%
# cuts added per iteration of the two-point run
for h in runs["tpe"].history:
    print(h.iteration, round(h.master_cost, 1), h.network_violations, h.scenario_violations)
