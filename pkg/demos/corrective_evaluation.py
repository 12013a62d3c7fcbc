"""
Out-of-sample corrective capability
===================================

A schedule is tested against fresh sampled days: a day fails if some hour
cannot be rebalanced within the units' corrective ranges and line limits.
CAI is the failure probability, ESC the extra no-load cost paid for the
more robust commitment.
"""

# %%
import numpy as np

from pescuc import cases, evaluation, stochastic
from pescuc.driver import solve_deterministic, solve_stochastic_tpe
from pescuc.model import compute_shift_factors

case = cases.six_bus()
net = compute_shift_factors(case)
base = solve_deterministic(case).schedule
tpe = solve_stochastic_tpe(case).schedule

# %%
days = stochastic.sample(case, 5000, seed=2024)
for name, s in [("base", base), ("tpe", tpe)]:
    rep = evaluation.evaluate(case, net, s, days, base)
    agg = evaluation.cai(case, net, s, days, aggregate_only=True)
    print("%-5s CAI %6.2f%%  (band only %6.2f%%)  ESC %.3f%%"
          % (name, 100 * rep.cai, 100 * agg, 100 * rep.esc))

# %%
# hours where the base schedule most often fails
rep = evaluation.evaluate(case, net, base, days)
worst = np.argsort(rep.hourly_violation)[::-1][:5]
print([(int(t) + 1, round(float(rep.hourly_violation[t]), 3)) for t in worst])

# %%
# stability of the estimate across the two halves of the sample
a, b, se = evaluation.half_sample_check(case, net, tpe, days)
print("halves %.4f %.4f  z = %.2f" % (a, b, (a - b) / se if se else 0.0))
