"""Benders loop: master UC -> hourly network checks -> hourly scenario checks.

Every iteration solves the master, runs the network check for every hour
and, in the stochastic modes, the scenario check for every hour and every
evaluation point (TPE concentration or reduced MCS scenario).  Violated
hours contribute cuts; the loop stops at the first iteration without any.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pem, stochastic
from .model import compute_shift_factors
from .scuc import (EPSILON, ScucError, make_network_cut, make_scenario_cut, make_schedule,
                   network_check, redispatch_cost, scenario_check, solve_master)


@dataclass
class Settings:
    epsilon: float = EPSILON
    max_iterations: int = 50
    milp_method: str = "highs"
    gap_tol: float = 1e-6
    lp_dump_dir: str | None = None


@dataclass
class IterationSummary:
    iteration: int
    master_cost: float
    network_violations: list
    scenario_violations: list
    network_cuts: int
    scenario_cuts: int
    max_network_slack: float
    max_mean_scenario_slack: float
    network_lp_calls: int
    scenario_lp_calls: int

    @property
    def violated(self):
        return bool(self.network_violations or self.scenario_violations)


@dataclass
class SolveReport:
    mode: str
    schedule: object
    iterations: int
    history: list
    cut_counts: dict
    expected_cost: float
    subproblem_solves: int
    n_points: int
    cost_std: float = 0.0
    wall_time: float = 0.0
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def schedule_cost(self):
        return self.schedule.total_cost

    def to_dict(self, include_timing=False):
        out = {
            "mode": self.mode,
            "seed": self.seed,
            "iterations": self.iterations,
            "expected_cost": round(float(self.expected_cost), 6),
            "cost_std": round(float(self.cost_std), 6),
            "schedule_cost": round(float(self.schedule.total_cost), 6),
            "cut_counts": dict(self.cut_counts),
            "subproblem_solves": self.subproblem_solves,
            "evaluation_points": self.n_points,
            "history": [{
                "iteration": h.iteration,
                "master_cost": round(h.master_cost, 6),
                "network_violated_hours": h.network_violations,
                "scenario_violated_hours": h.scenario_violations,
                "network_cuts": h.network_cuts,
                "scenario_cuts": h.scenario_cuts,
                "max_network_slack": round(h.max_network_slack, 9),
                "max_mean_scenario_slack": round(h.max_mean_scenario_slack, 9),
                "network_lp_calls": h.network_lp_calls,
                "scenario_lp_calls": h.scenario_lp_calls,
            } for h in self.history],
            "details": self.details,
            "schedule": self.schedule.to_dict(),
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time
        return out


class ConvergenceError(ScucError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def _dump_path(settings, name):
    if settings.lp_dump_dir is None:
        return None
    d = Path(settings.lp_dump_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def benders(case, points=(), weights=(), settings=None, mode="deterministic", network=None):
    """Run the decomposition with scenario checks at ``points``.

    ``points`` are deviate vectors (one entry per load point then wind
    farm) and ``weights`` their probabilities.  With no points only the
    network checks run.
    """
    settings = settings or Settings()
    network = network or compute_shift_factors(case)
    weights = np.asarray(weights, dtype=float)
    realizations = [case.realize(pt) for pt in points]
    nt = case.horizon
    eps = settings.epsilon

    start = time.perf_counter()
    cuts, history = [], []
    counts = {"network": 0, "scenario": 0}
    solves = 0
    schedule = None
    for it in range(1, settings.max_iterations + 1):
        schedule = solve_master(case, cuts, settings.milp_method, settings.gap_tol,
                                _dump_path(settings, f"master_it{it}.lp"))
        new_cuts = []
        net_bad, net_max = [], 0.0
        for t in range(nt):
            res = network_check(network, case, schedule, t, eps,
                                _dump_path(settings, f"network_it{it}_t{t + 1}.lp"))
            solves += 1
            net_max = max(net_max, res.objective)
            if res.violated:
                net_bad.append(t + 1)
                new_cuts.append(make_network_cut(network, res, schedule, it))
        n_net = len(new_cuts)

        scen_bad, scen_max, scen_calls = [], 0.0, 0
        if realizations:
            for t in range(nt):
                results = []
                for k, (loads, wind) in enumerate(realizations):
                    results.append(scenario_check(
                        network, case, schedule, t, loads[:, t], wind[:, t], eps,
                        _dump_path(settings, f"scenario_it{it}_t{t + 1}_p{k + 1}.lp")))
                scen_calls += len(results)
                mean_obj = float(weights @ np.array([r.objective for r in results]))
                scen_max = max(scen_max, mean_obj)
                if mean_obj > eps:
                    scen_bad.append(t + 1)
                    new_cuts.append(make_scenario_cut(case, results, weights, schedule, it, eps))
        solves += scen_calls

        history.append(IterationSummary(it, schedule.total_cost, net_bad, scen_bad, n_net,
                                        len(new_cuts) - n_net, net_max, scen_max, nt, scen_calls))
        if not new_cuts:
            break
        counts["network"] += n_net
        counts["scenario"] += len(new_cuts) - n_net
        cuts.extend(new_cuts)

    report = SolveReport(mode, schedule, len(history), history, counts, schedule.total_cost,
                         solves, len(realizations))
    if history[-1].violated:
        report.wall_time = time.perf_counter() - start
        raise ConvergenceError(
            f"no convergence within {settings.max_iterations} iterations "
            f"(last violated hours: network {history[-1].network_violations}, "
            f"scenario {history[-1].scenario_violations})", report)

    if realizations:
        costs = [redispatch_cost(case, network, schedule, loads, wind)[0]
                 for loads, wind in realizations]
        est = pem.estimate_moments(zip(weights, costs), j_max=2)
        report.expected_cost = float(est.mean)
        report.cost_std = float(est.std)
    report.wall_time = time.perf_counter() - start
    return report


def solve_deterministic(case, settings=None):
    """Base case: uncertain inputs at their forecast values."""
    return benders(case, settings=settings, mode="deterministic")


def tpe_points(case):
    """Evaluation points and weights of the two-point estimate scheme."""
    inputs = stochastic.random_inputs(case)
    conc = pem.build_concentrations(inputs)
    return [np.array(c.point) for c in conc], [c.weight for c in conc], conc


def solve_stochastic_tpe(case, settings=None):
    points, weights, conc = tpe_points(case)
    if not points:
        report = solve_deterministic(case, settings)
        report.mode = "tpe"
        return report
    report = benders(case, points, weights, settings, mode="tpe")
    report.details = {"m": len(points) // 2,
                      "concentrations": [{"variable": case.uncertain[c.index].id,
                                          "side": c.side, "xi": round(c.xi, 12),
                                          "deviate": round(c.location, 12),
                                          "weight": round(c.weight, 12)} for c in conc]}
    return report


def solve_scenarios(case, scen, settings=None, mode="mcs"):
    return benders(case, list(scen.deviates), scen.probabilities, settings, mode=mode)


def solve_stochastic_mcs(case, n_samples=10000, n_reduced=100, seed=0, settings=None):
    if n_reduced > n_samples:
        raise ValueError(f"n_reduced={n_reduced} exceeds n_samples={n_samples}")
    raw = stochastic.sample(case, n_samples, seed)
    red = stochastic.reduce(raw, n_reduced)
    report = solve_scenarios(case, red, settings, "mcs")
    report.seed = seed
    report.details = {"n_samples": n_samples, "n_reduced": n_reduced,
                      "reduction_distance": round(stochastic.kantorovich_objective(raw, red), 12)}
    return report


# --------------------------------------------------------------------------
# output files

def write_report(report, path, include_timing=False):
    Path(path).write_text(json.dumps(report.to_dict(include_timing), indent=1) + "\n")


def write_schedule_csv(case, schedule, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["unit", "hour", "committed", "dispatch_mw"])
        for g, u in enumerate(case.units):
            for t in range(case.horizon):
                w.writerow([u.id, t + 1, int(schedule.commitment[g, t]),
                            f"{schedule.dispatch[g, t]:.6f}"])


def read_schedule_csv(case, path):
    ids = [u.id for u in case.units]
    com = np.zeros((case.n_units, case.horizon))
    disp = np.zeros((case.n_units, case.horizon))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            g = ids.index(row["unit"])
            t = int(row["hour"]) - 1
            com[g, t] = float(row["committed"])
            disp[g, t] = float(row["dispatch_mw"])
    return make_schedule(case, com, disp)
