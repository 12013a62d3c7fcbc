"""Out-of-sample evaluation of a schedule: CAI and ESC.

CAI (corrective actions incapability) is the probability that a realised
day contains at least one hour whose deviation from the schedule cannot be
absorbed by corrective re-dispatch.  ESC (extra spinning cost) is the
no-load cost of unit-hours committed by a schedule on top of a reference
schedule, relative to the schedule's total cost.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scuc import scenario_check

TOL = 1e-6


@dataclass
class EvaluationReport:
    cai: float
    esc: float | None
    hourly_violation: np.ndarray
    n_samples: int
    seed: int | None
    aggregate_only: bool = False
    lp_calls: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "cai": round(self.cai, 12),
            "esc": None if self.esc is None else round(self.esc, 12),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "aggregate_only": self.aggregate_only,
            "hourly_violation_probability": [round(float(v), 12) for v in self.hourly_violation],
            "details": self.details,
        }

    def write(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "evaluation.json").write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        with open(directory / "violations.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["hour", "violation_probability"])
            for t, v in enumerate(self.hourly_violation):
                w.writerow([t + 1, f"{v:.12f}"])


def satisfied_hours(case, network, schedule, scenarios, aggregate_only=False):
    """Boolean matrix (n_scenarios, NT): corrective action succeeds.

    Vectorised screening settles most scenarios; the scenario-check LP is
    solved only for the rest.  Returns the matrix and the number of LPs.
    """
    dev = scenarios.deviates
    nl = len(case.loads)
    load_mean = case.load_matrix()
    wind_mean = case.wind_matrix()
    com = schedule.commitment
    p_hat = schedule.dispatch
    r_up = np.array([u.corrective_up for u in case.units])
    r_dn = np.array([u.corrective_dn for u in case.units])
    p_max = np.array([u.p_max for u in case.units])
    p_min = np.array([u.p_min for u in case.units])
    limits = np.array([ln.flow_limit for ln in case.lines])

    ok = np.ones((len(scenarios), case.horizon), dtype=bool)
    calls = 0
    for t in range(case.horizon):
        loads = dev[:, :nl] * load_mean[:, t]                       # (S, NL)
        wind = np.maximum(dev[:, nl:] * wind_mean[:, t], 0.0)       # (S, NW)
        # generation surplus before correction
        mismatch = p_hat[:, t].sum() + wind.sum(1) - loads.sum(1)
        on = com[:, t]
        band_up = (r_up * on).sum()
        band_dn = (r_dn * on).sum()
        agg = (mismatch >= -band_up - TOL) & (mismatch <= band_dn + TOL)
        if aggregate_only:
            ok[:, t] = agg
            continue

        cap_up = np.maximum(np.minimum(r_up, p_max - p_hat[:, t]), 0.0) * on
        cap_dn = np.maximum(np.minimum(r_dn, p_hat[:, t] - p_min), 0.0) * on
        need = -mismatch
        feasible = agg & (need <= cap_up.sum() + TOL) & (need >= -cap_dn.sum() - TOL)
        base = (p_hat[:, t] @ network.ptdf_gen.T + wind @ network.ptdf_wind.T
                - loads @ network.ptdf_load.T)                      # (S, NL)
        found, refuted = _screen(network.ptdf_gen, base, limits, -cap_dn, cap_up, need)
        ok[:, t] = feasible & found
        for s in np.flatnonzero(feasible & ~found & ~refuted):
            res = scenario_check(network, case, schedule, t, loads[s], wind[s])
            calls += 1
            ok[s, t] = res.objective <= TOL
    return ok, calls


def _greedy(order, lo, hi, need):
    """Box-constrained shifts summing to ``need``, filled in ``order``."""
    width = (hi - lo)[order]
    before = np.concatenate([[0.0], np.cumsum(width)[:-1]])
    rest = need - lo.sum()
    amount = np.clip(rest[:, None] - before[None, :], 0.0, width[None, :])
    delta = np.empty_like(amount)
    delta[:, order] = lo[order][None, :] + amount
    return delta


def _screen(sf_gen, base, limits, lo, hi, need):
    """Cheap exact decisions on corrective feasibility.

    Each line's extreme flows over the box ``lo <= d <= hi, sum(d) = need``
    come from a greedy fill sorted by shift factor.  An extreme beyond the
    limit refutes feasibility; any candidate shift (the extremes plus a
    proportional split) that respects every limit proves it.  Scenarios
    decided by neither need an LP.
    """
    n = base.shape[0]
    width = hi - lo
    share = width / width.sum() if width.sum() > 0 else np.zeros_like(width)
    rest = need - lo.sum()
    candidates = [lo[None, :] + rest[:, None] * share[None, :]]
    refuted = np.zeros(n, dtype=bool)
    for l, row in enumerate(sf_gen):
        order = np.argsort(row, kind="stable")
        d_min = _greedy(order, lo, hi, need)
        d_max = _greedy(order[::-1], lo, hi, need)
        refuted |= base[:, l] + d_min @ row > limits[l] + TOL
        refuted |= base[:, l] + d_max @ row < -limits[l] - TOL
        candidates += [d_min, d_max]
    found = np.zeros(n, dtype=bool)
    for d in candidates:
        flows = base + d @ sf_gen.T
        found |= np.all(np.abs(flows) <= limits + TOL, axis=1)
    return found & ~refuted, refuted


def cai(case, network, schedule, scenarios, aggregate_only=False):
    if len(scenarios) == 0:
        raise ValueError("empty scenario set")
    ok, _ = satisfied_hours(case, network, schedule, scenarios, aggregate_only)
    return 1.0 - math.fsum(scenarios.probabilities[ok.all(axis=1)])


def esc(case, schedule_new, schedule_base):
    """No-load cost of extra unit-hours over total cost of ``schedule_new``."""
    extra = (np.round(schedule_new.commitment) - np.round(schedule_base.commitment)) == 1
    c0 = np.array([u.no_load_cost for u in case.units])
    return float((c0[:, None] * extra).sum() / schedule_new.total_cost)


def evaluate(case, network, schedule, scenarios, base_schedule=None, aggregate_only=False):
    ok, calls = satisfied_hours(case, network, schedule, scenarios, aggregate_only)
    p = scenarios.probabilities
    hourly = np.array([math.fsum(p[~ok[:, t]]) for t in range(case.horizon)])
    value = 1.0 - math.fsum(p[ok.all(axis=1)])
    e = None if base_schedule is None else esc(case, schedule, base_schedule)
    return EvaluationReport(value, e, hourly, len(scenarios), scenarios.seed, aggregate_only,
                            calls)


def half_sample_check(case, network, schedule, scenarios, aggregate_only=False):
    """CAI on the two halves of an equiprobable sample and the z-score of their gap."""
    n = len(scenarios)
    first = scenarios.subset(np.arange(n // 2))
    second = scenarios.subset(np.arange(n // 2, n))
    a = cai(case, network, schedule, first, aggregate_only)
    b = cai(case, network, schedule, second, aggregate_only)
    n1, n2 = len(first), len(second)
    pooled = (a * n1 + b * n2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    return a, b, se
