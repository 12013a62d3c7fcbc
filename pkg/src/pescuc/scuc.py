"""Master unit commitment, hourly network / scenario checks and Benders cuts.

Dual convention (see :mod:`pescuc.optkernel`): every multiplier of a ``<=``
row is nonnegative and equals ``-d(obj)/d(rhs)``.  With that convention the
feasibility cuts read

    network:   s_hat + (lam1 - lam2)^T SF K_P (P_t - P_hat_t) <= 0
    scenario:  S_hat + sum_i (lam2 - lam1)_i (P_it - P_hat_it)
                     - (lam1 R_up + lam2 R_dn + mu1 P_max - mu2 P_min)_i (I_it - I_hat_it) <= 0

which are first-order expansions of the (convex) subproblem value in the
master's variables.  Wind enters every flow expression as a fixed nodal
injection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import CORRECTIVE_FRACTION
from .optkernel import EQ, GE, LE, LPBuilder, solve_lp, solve_milp, write_lp

EPSILON = 1e-3
PENALTY_PRICE = 1000.0  # $/MW for any slack in the re-dispatch LP


class ScucError(RuntimeError):
    pass


class MasterInfeasible(ScucError):
    pass


class DegenerateCut(ScucError):
    pass


def _solve_check(lp, what, t):
    sol = solve_lp(lp)
    if not sol.optimal:
        raise ScucError(f"{what} check LP at hour {t + 1}: {sol.status}")
    return sol


@dataclass
class Schedule:
    commitment: np.ndarray      # (NG, NT) 0/1
    dispatch: np.ndarray        # (NG, NT) MW
    spinning: np.ndarray
    operating: np.ndarray
    startup_cost: np.ndarray
    shutdown_cost: np.ndarray
    total_cost: float

    def to_dict(self):
        return {
            "commitment": self.commitment.astype(int).tolist(),
            "dispatch": _rounded(self.dispatch),
            "spinning": _rounded(self.spinning),
            "operating": _rounded(self.operating),
            "startup_cost": _rounded(self.startup_cost),
            "shutdown_cost": _rounded(self.shutdown_cost),
            "total_cost": round(float(self.total_cost), 6),
        }


def _rounded(a, nd=6):
    return np.round(np.asarray(a, dtype=float), nd).tolist()


@dataclass
class BendersCut:
    """``constant + p_coef . P_t + i_coef . I_t <= 0``."""

    hour: int
    kind: str                   # "network" | "scenario"
    p_coef: np.ndarray
    i_coef: np.ndarray
    constant: float
    iteration: int = 0
    value: float = 0.0          # subproblem objective at the producing schedule

    def evaluate(self, dispatch_t, commitment_t):
        return float(self.constant + self.p_coef @ dispatch_t + self.i_coef @ commitment_t)


@dataclass
class CheckResult:
    hour: int
    kind: str
    objective: float
    slacks: dict
    line_duals_up: np.ndarray = None    # lam1: flow <= limit rows
    line_duals_dn: np.ndarray = None    # lam2: -flow <= limit rows
    ramp_up_duals: np.ndarray = None    # lam1_it
    ramp_dn_duals: np.ndarray = None    # lam2_it
    cap_max_duals: np.ndarray = None    # mu1_it
    cap_min_duals: np.ndarray = None    # mu2_it
    epsilon: float = EPSILON

    @property
    def violated(self):
        return self.objective > self.epsilon


def energy_cost_matrix(case, dispatch):
    return np.vstack([u.energy_cost(dispatch[g]) for g, u in enumerate(case.units)])


def transitions(case, commitment):
    """Startup and shutdown indicators (NG, NT) given initial status."""
    init = np.array([1.0 if u.initially_on else 0.0 for u in case.units])
    prev = np.column_stack([init, commitment[:, :-1]])
    return np.maximum(commitment - prev, 0.0), np.maximum(prev - commitment, 0.0)


def schedule_cost(case, commitment, dispatch):
    """Generation + no-load + startup/shutdown cost of a schedule."""
    commitment = np.asarray(commitment, dtype=float)
    v, w = transitions(case, commitment)
    c0 = np.array([u.no_load_cost for u in case.units])
    su = np.array([u.startup_cost for u in case.units])
    sd = np.array([u.shutdown_cost for u in case.units])
    energy = energy_cost_matrix(case, np.asarray(dispatch, dtype=float) * commitment)
    return float(energy.sum() + c0 @ commitment.sum(axis=1) + su @ v.sum(axis=1)
                 + sd @ w.sum(axis=1))


def make_schedule(case, commitment, dispatch, spinning=None, operating=None):
    commitment = np.asarray(commitment, dtype=float).round()
    dispatch = np.asarray(dispatch, dtype=float)
    v, w = transitions(case, commitment)
    su = np.array([u.startup_cost for u in case.units])[:, None] * v
    sd = np.array([u.shutdown_cost for u in case.units])[:, None] * w
    zeros = np.zeros_like(dispatch)
    return Schedule(commitment, dispatch,
                    zeros if spinning is None else spinning,
                    zeros if operating is None else operating,
                    su, sd, schedule_cost(case, commitment, dispatch))


# --------------------------------------------------------------------------
# master problem

class MasterProblem:
    """Unit commitment MILP over the base case with accumulated cuts."""

    def __init__(self, case, cuts=()):
        self.case = case
        self.b = b = LPBuilder()
        ng, nt = case.n_units, case.horizon
        self._check_structure()

        self.I = b.add_vars("I", (ng, nt), 0.0, 1.0, binary=True)
        self.P = b.add_vars("P", (ng, nt), 0.0, math.inf)
        self.V = b.add_vars("V", (ng, nt), 0.0, 1.0)
        self.W = b.add_vars("W", (ng, nt), 0.0, 1.0)
        self.RS = b.add_vars("RS", (ng, nt), 0.0, math.inf)
        self.RO = b.add_vars("RO", (ng, nt), 0.0, math.inf)
        self.D = []

        for g, u in enumerate(case.units):
            widths, mcs = u.segment_widths(), u.marginal_costs()
            seg = b.add_vars(f"D{g}", (len(widths), nt), 0.0, math.inf)
            self.D.append(seg)
            i0 = 1.0 if u.initially_on else 0.0
            p0 = u.initial_output
            for t in range(nt):
                I, P = self.I[g, t], self.P[g, t]
                b.set_cost(I, u.no_load_cost)
                b.set_cost(self.V[g, t], u.startup_cost)
                b.set_cost(self.W[g, t], u.shutdown_cost)
                for k in range(len(widths)):
                    b.set_cost(seg[k, t], mcs[k])
                    b.add_row([seg[k, t], I], [1.0, -widths[k]], LE, 0.0, f"seg_{g}_{k}_{t}")
                b.add_row([P, *seg[:, t]], [1.0] + [-1.0] * len(widths), EQ, 0.0, f"pdef_{g}_{t}")
                b.add_row([P, I], [1.0, -u.p_max], LE, 0.0, f"pmax_{g}_{t}")
                b.add_row([P, I], [1.0, -u.p_min], GE, 0.0, f"pmin_{g}_{t}")

                # startup / shutdown indicators, exact at integer commitments
                if t == 0:
                    b.add_row([self.V[g, t], I], [1.0, -1.0], GE, -i0, f"v_lo_{g}_{t}")
                    b.add_row([self.V[g, t], I], [1.0, -1.0], LE, 0.0, f"v_on_{g}_{t}")
                    b.add_row([self.V[g, t]], [1.0], LE, 1.0 - i0, f"v_prev_{g}_{t}")
                    b.add_row([self.W[g, t], I], [1.0, 1.0], GE, i0, f"w_lo_{g}_{t}")
                    b.add_row([self.W[g, t]], [1.0], LE, i0, f"w_prev_{g}_{t}")
                    b.add_row([self.W[g, t], I], [1.0, 1.0], LE, 1.0, f"w_on_{g}_{t}")
                    # ramping from the initial state
                    b.add_row([P, self.V[g, t]], [1.0, -(u.p_min - u.ramp_up)], LE,
                              u.ramp_up + p0, f"rup_{g}_{t}")
                    b.add_row([P, self.W[g, t]], [-1.0, -(u.p_min - u.ramp_down)], LE,
                              u.ramp_down - p0, f"rdn_{g}_{t}")
                else:
                    Ip, Pp = self.I[g, t - 1], self.P[g, t - 1]
                    b.add_row([self.V[g, t], I, Ip], [1.0, -1.0, 1.0], GE, 0.0, f"v_lo_{g}_{t}")
                    b.add_row([self.V[g, t], I], [1.0, -1.0], LE, 0.0, f"v_on_{g}_{t}")
                    b.add_row([self.V[g, t], Ip], [1.0, 1.0], LE, 1.0, f"v_prev_{g}_{t}")
                    b.add_row([self.W[g, t], Ip, I], [1.0, -1.0, 1.0], GE, 0.0, f"w_lo_{g}_{t}")
                    b.add_row([self.W[g, t], Ip], [1.0, -1.0], LE, 0.0, f"w_prev_{g}_{t}")
                    b.add_row([self.W[g, t], I], [1.0, 1.0], LE, 1.0, f"w_on_{g}_{t}")
                    b.add_row([P, Pp, self.V[g, t]], [1.0, -1.0, -(u.p_min - u.ramp_up)], LE,
                              u.ramp_up, f"rup_{g}_{t}")
                    b.add_row([Pp, P, self.W[g, t]], [1.0, -1.0, -(u.p_min - u.ramp_down)], LE,
                              u.ramp_down, f"rdn_{g}_{t}")

                b.add_row([self.RS[g, t], P, I], [1.0, 1.0, -u.p_max], LE, 0.0, f"rs_head_{g}_{t}")
                b.add_row([self.RS[g, t], I], [1.0, -CORRECTIVE_FRACTION * u.ramp_up], LE, 0.0,
                          f"rs_ramp_{g}_{t}")
                b.add_row([self.RO[g, t], P, I], [1.0, 1.0, -u.p_max], LE, 0.0, f"ro_head_{g}_{t}")

                # minimum up / down windows
                lo_on = max(0, t - u.min_on + 1)
                b.add_row([*self.V[g, lo_on:t + 1], I], [1.0] * (t + 1 - lo_on) + [-1.0], LE, 0.0,
                          f"minon_{g}_{t}")
                lo_off = max(0, t - u.min_off + 1)
                b.add_row([*self.W[g, lo_off:t + 1], I], [1.0] * (t + 1 - lo_off) + [1.0], LE, 1.0,
                          f"minoff_{g}_{t}")

            # carry-over of the initial up/down time
            h = u.initial_status
            forced = (u.min_on - h) if h > 0 else (u.min_off + h)
            for t in range(min(max(forced, 0), nt)):
                b.lb[self.I[g, t]] = b.ub[self.I[g, t]] = i0

        net = case.net_load()
        for t in range(nt):
            b.add_row(self.P[:, t], np.ones(ng), EQ, net[t], f"balance_{t}")
            b.add_row(self.RS[:, t], np.ones(ng), GE, case.spinning_reserve[t], f"spin_{t}")
            b.add_row(self.RO[:, t], np.ones(ng), GE, case.operating_reserve[t], f"oper_{t}")

        self.cuts = []
        for cut in cuts:
            self.add_cut(cut)

    def _check_structure(self):
        case = self.case
        pmax = sum(u.p_max for u in case.units)
        spin_cap = sum(min(u.p_max, CORRECTIVE_FRACTION * u.ramp_up) for u in case.units)
        net = case.net_load()
        for t in range(case.horizon):
            if case.spinning_reserve[t] > spin_cap + 1e-9:
                raise MasterInfeasible(
                    f"hour {t + 1}: spinning reserve requirement {case.spinning_reserve[t]} MW "
                    f"exceeds fleet 10-minute capability {spin_cap:.3f} MW")
            head = pmax - net[t]
            need = max(case.spinning_reserve[t], case.operating_reserve[t])
            if need > head + 1e-9:
                raise MasterInfeasible(
                    f"hour {t + 1}: reserve requirement {need} MW exceeds fleet headroom "
                    f"{head:.3f} MW")

    def add_cut(self, cut):
        t = cut.hour
        cols = list(self.P[:, t]) + list(self.I[:, t])
        vals = list(cut.p_coef) + list(cut.i_coef)
        self.b.add_row(cols, vals, LE, -cut.constant, f"cut{len(self.cuts)}_{cut.kind}_{t}")
        self.cuts.append(cut)

    def add_line_limits(self, network):
        """Base-case flow limits inlined (extensive form only)."""
        case = self.case
        loads, wind = case.load_matrix(), case.wind_matrix()
        limits = np.array([ln.flow_limit for ln in case.lines])
        for t in range(case.horizon):
            fixed = network.ptdf_wind @ wind[:, t] - network.ptdf_load @ loads[:, t]
            for l in range(case.n_lines):
                row = network.ptdf_gen[l]
                self.b.add_row(self.P[:, t], row, LE, limits[l] - fixed[l], f"flow_up_{l}_{t}")
                self.b.add_row(self.P[:, t], -row, LE, limits[l] + fixed[l], f"flow_dn_{l}_{t}")

    def add_scenario_block(self, network, loads, wind, tag):
        """Corrective dispatch constraints of one scenario (extensive form only)."""
        case, b = self.case, self.b
        limits = np.array([ln.flow_limit for ln in case.lines])
        ng = case.n_units
        pc = b.add_vars(f"Pc{tag}", (ng, case.horizon), -math.inf, math.inf)
        for t in range(case.horizon):
            b.add_row(pc[:, t], np.ones(ng), EQ,
                      loads[:, t].sum() - wind[:, t].sum(), f"s{tag}_bal_{t}")
            for g, u in enumerate(case.units):
                P, I, x = self.P[g, t], self.I[g, t], pc[g, t]
                b.add_row([x, P, I], [1.0, -1.0, -u.corrective_up], LE, 0.0, f"s{tag}_up_{g}_{t}")
                b.add_row([P, x, I], [1.0, -1.0, -u.corrective_dn], LE, 0.0, f"s{tag}_dn_{g}_{t}")
                b.add_row([x, I], [1.0, -u.p_max], LE, 0.0, f"s{tag}_max_{g}_{t}")
                b.add_row([x, I], [1.0, -u.p_min], GE, 0.0, f"s{tag}_min_{g}_{t}")
            fixed = network.ptdf_wind @ wind[:, t] - network.ptdf_load @ loads[:, t]
            for l in range(case.n_lines):
                row = network.ptdf_gen[l]
                b.add_row(pc[:, t], row, LE, limits[l] - fixed[l], f"s{tag}_fu_{l}_{t}")
                b.add_row(pc[:, t], -row, LE, limits[l] + fixed[l], f"s{tag}_fd_{l}_{t}")

    @property
    def lp(self):
        return self.b.build()

    def solve(self, method="bnb", gap_tol=1e-6, dump=None):
        lp = self.lp
        if dump is not None:
            write_lp(lp, dump, "master")
        sol = solve_milp(lp, gap_tol=gap_tol, method=method)
        if not sol.optimal:
            raise MasterInfeasible(f"master problem status: {sol.status}")
        return self.extract(sol), sol

    def extract(self, sol):
        x = sol.x
        case = self.case
        commitment = np.round(x[self.I])
        dispatch = np.where(commitment > 0, x[self.P], 0.0)
        su = np.array([u.startup_cost for u in case.units])[:, None] * np.round(x[self.V])
        sd = np.array([u.shutdown_cost for u in case.units])[:, None] * np.round(x[self.W])
        return Schedule(commitment, dispatch, x[self.RS], x[self.RO], su, sd, sol.objective)


def build_master(case, cuts=()):
    return MasterProblem(case, cuts)


def solve_master(case, cuts=(), method="bnb", gap_tol=1e-6, dump=None):
    schedule, _ = MasterProblem(case, cuts).solve(method, gap_tol, dump)
    return schedule


# --------------------------------------------------------------------------
# hourly subproblems

def network_check(network, case, schedule, hour, epsilon=EPSILON, dump=None):
    """Minimum common overload ``s_t`` of the base-case flows at ``hour``."""
    t = hour
    flows = network.flows(schedule.dispatch[:, t], case.load_matrix()[:, t],
                          case.wind_matrix()[:, t])
    limits = np.array([ln.flow_limit for ln in case.lines])
    b = LPBuilder()
    s = b.add_var("s", 0.0, math.inf, 1.0)
    up = [b.add_row([s], [-1.0], LE, limits[l] - flows[l], f"lam1_{l}") for l in range(case.n_lines)]
    dn = [b.add_row([s], [-1.0], LE, limits[l] + flows[l], f"lam2_{l}") for l in range(case.n_lines)]
    lp = b.build()
    if dump is not None:
        write_lp(lp, dump, f"network_check_t{t + 1}")
    sol = _solve_check(lp, "network", t)
    return CheckResult(t, "network", max(sol.objective, 0.0), {"s": float(sol.x[0])},
                       line_duals_up=sol.duals[up], line_duals_dn=sol.duals[dn],
                       epsilon=epsilon)


def make_network_cut(network, result, schedule, iteration=0):
    if not result.violated:
        raise ValueError(f"hour {result.hour + 1}: network check is not violated; no cut")
    t = result.hour
    g = (result.line_duals_up - result.line_duals_dn) @ network.ptdf_gen
    if np.all(np.abs(g) < 1e-12):
        raise DegenerateCut(f"hour {t + 1}: network cut has all-zero coefficients "
                            f"(overload {result.objective:.6g} MW cannot be relieved by dispatch)")
    p_hat = schedule.dispatch[:, t]
    i_coef = np.zeros_like(g)
    return BendersCut(t, "network", g, i_coef, result.objective - g @ p_hat, iteration,
                      result.objective)


def scenario_check(network, case, schedule, hour, loads, wind, epsilon=EPSILON, dump=None):
    """Corrective re-dispatch feasibility at ``hour`` for one realisation.

    ``loads`` and ``wind`` are the realised MW per load point / wind farm at
    this hour.
    """
    t = hour
    ng = case.n_units
    loads = np.asarray(loads, dtype=float)
    wind = np.asarray(wind, dtype=float)
    p_hat = schedule.dispatch[:, t]
    i_hat = schedule.commitment[:, t]
    limits = np.array([ln.flow_limit for ln in case.lines])
    fixed = network.ptdf_wind @ wind - network.ptdf_load @ loads

    b = LPBuilder()
    pc = [b.add_var(f"Pc_{g}", -math.inf, math.inf) for g in range(ng)]
    s = b.add_var("s", 0.0, math.inf, 1.0)
    s1 = b.add_var("s1", 0.0, math.inf, 1.0)
    s2 = b.add_var("s2", 0.0, math.inf, 1.0)
    for l in range(case.n_lines):
        row = network.ptdf_gen[l]
        b.add_row(pc + [s], list(row) + [-1.0], LE, limits[l] - fixed[l], f"flow_up_{l}")
        b.add_row(pc + [s], list(-row) + [-1.0], LE, limits[l] + fixed[l], f"flow_dn_{l}")
    b.add_row(pc + [s1, s2], [1.0] * ng + [1.0, -1.0], EQ, loads.sum() - wind.sum(), "balance")
    rows = np.empty((4, ng), dtype=int)
    for g, u in enumerate(case.units):
        rows[0, g] = b.add_row([pc[g]], [1.0], LE, p_hat[g] + u.corrective_up * i_hat[g], f"lam1_{g}")
        rows[1, g] = b.add_row([pc[g]], [-1.0], LE, -p_hat[g] + u.corrective_dn * i_hat[g], f"lam2_{g}")
        rows[2, g] = b.add_row([pc[g]], [1.0], LE, u.p_max * i_hat[g], f"mu1_{g}")
        rows[3, g] = b.add_row([pc[g]], [-1.0], LE, -u.p_min * i_hat[g], f"mu2_{g}")
    lp = b.build()
    if dump is not None:
        write_lp(lp, dump, f"scenario_check_t{t + 1}")
    sol = _solve_check(lp, "scenario", t)
    y = sol.duals
    nl = case.n_lines
    return CheckResult(
        t, "scenario", max(sol.objective, 0.0),
        {"s": float(sol.x[s]), "s1": float(sol.x[s1]), "s2": float(sol.x[s2]),
         "dispatch": sol.x[:ng].copy()},
        line_duals_up=y[0:2 * nl:2], line_duals_dn=y[1:2 * nl:2],
        ramp_up_duals=y[rows[0]], ramp_dn_duals=y[rows[1]],
        cap_max_duals=y[rows[2]], cap_min_duals=y[rows[3]], epsilon=epsilon)


def make_scenario_cut(case, results, weights, schedule, iteration=0, epsilon=EPSILON):
    """One expected-feasibility cut from weighted scenario checks at one hour."""
    results = list(results)
    weights = np.asarray(weights, dtype=float)
    if abs(math.fsum(weights) - 1.0) > 1e-9:
        raise ValueError(f"scenario weights sum to {math.fsum(weights)!r}, expected 1")
    hours = {r.hour for r in results}
    if len(hours) != 1:
        raise ValueError(f"results span several hours: {sorted(hours)}")
    t = hours.pop()
    mean_obj = float(sum(w * r.objective for w, r in zip(weights, results)))
    if not mean_obj > epsilon:
        raise ValueError(f"hour {t + 1}: mean scenario violation {mean_obj:.3g} <= {epsilon}; no cut")

    r_up = np.array([u.corrective_up for u in case.units])
    r_dn = np.array([u.corrective_dn for u in case.units])
    p_max = np.array([u.p_max for u in case.units])
    p_min = np.array([u.p_min for u in case.units])
    lam1 = sum(w * r.ramp_up_duals for w, r in zip(weights, results))
    lam2 = sum(w * r.ramp_dn_duals for w, r in zip(weights, results))
    mu1 = sum(w * r.cap_max_duals for w, r in zip(weights, results))
    mu2 = sum(w * r.cap_min_duals for w, r in zip(weights, results))

    p_coef = lam2 - lam1
    i_coef = -(lam1 * r_up + lam2 * r_dn + mu1 * p_max - mu2 * p_min)
    if np.all(np.abs(p_coef) < 1e-12) and np.all(np.abs(i_coef) < 1e-12):
        raise DegenerateCut(f"hour {t + 1}: scenario cut has all-zero coefficients "
                            f"(mean violation {mean_obj:.6g} MW is not schedule dependent)")
    p_hat = schedule.dispatch[:, t]
    i_hat = schedule.commitment[:, t]
    constant = mean_obj - p_coef @ p_hat - i_coef @ i_hat
    return BendersCut(t, "scenario", p_coef, i_coef, constant, iteration, mean_obj)


# --------------------------------------------------------------------------
# oracles and reporting

def solve_extensive_form(case, network, realizations, method="bnb", gap_tol=1e-6):
    """Monolithic MILP with base flows and every scenario's corrective block.

    ``realizations`` is a list of ``(loads, wind)`` matrices.
    """
    mp = MasterProblem(case)
    mp.add_line_limits(network)
    for k, (loads, wind) in enumerate(realizations):
        mp.add_scenario_block(network, loads, wind, k)
    return mp.solve(method, gap_tol)


def redispatch_cost(case, network, schedule, loads, wind, penalty=PENALTY_PRICE):
    """Cost of operating ``schedule``'s commitment under one realised day.

    Dispatch is re-optimised hour by hour inside the corrective band around
    the scheduled dispatch, with ramping, reserve and flow limits kept.  Any
    residual infeasibility is priced at ``penalty`` $/MW.  Returns
    ``(cost, total_slack_mw)``.
    """
    ng, nt = case.n_units, case.horizon
    com = schedule.commitment
    p_hat = schedule.dispatch
    v, w = transitions(case, com)
    fixed_cost = schedule_cost(case, com, np.zeros_like(p_hat))
    limits = np.array([ln.flow_limit for ln in case.lines])

    b = LPBuilder()
    P = np.empty((ng, nt), dtype=int)
    slacks = []
    for g, u in enumerate(case.units):
        widths, mcs = u.segment_widths(), u.marginal_costs()
        for t in range(nt):
            on = com[g, t]
            lo = max(u.p_min * on, p_hat[g, t] - u.corrective_dn * on)
            hi = min(u.p_max * on, p_hat[g, t] + u.corrective_up * on)
            P[g, t] = b.add_var(f"P_{g}_{t}", lo, max(lo, hi))
            segs = [b.add_var(f"D_{g}_{k}_{t}", 0.0, widths[k] * on, mcs[k]) for k in range(len(widths))]
            b.add_row([P[g, t], *segs], [1.0] + [-1.0] * len(segs), EQ, 0.0)
        for t in range(nt):
            ru = b.add_var(f"ramp_up_slack_{g}_{t}", 0.0, math.inf, penalty)
            rd = b.add_var(f"ramp_dn_slack_{g}_{t}", 0.0, math.inf, penalty)
            slacks += [ru, rd]
            up_rhs = u.ramp_up + (u.p_min - u.ramp_up) * v[g, t]
            dn_rhs = u.ramp_down + (u.p_min - u.ramp_down) * w[g, t]
            if t == 0:
                b.add_row([P[g, t], ru], [1.0, -1.0], LE, up_rhs + u.initial_output)
                b.add_row([P[g, t], rd], [-1.0, -1.0], LE, dn_rhs - u.initial_output)
            else:
                b.add_row([P[g, t], P[g, t - 1], ru], [1.0, -1.0, -1.0], LE, up_rhs)
                b.add_row([P[g, t - 1], P[g, t], rd], [1.0, -1.0, -1.0], LE, dn_rhs)

    for t in range(nt):
        rs = [b.add_var(f"RS_{g}_{t}", 0.0, CORRECTIVE_FRACTION * u.ramp_up * com[g, t])
              for g, u in enumerate(case.units)]
        ro = [b.add_var(f"RO_{g}_{t}", 0.0, math.inf) for g in range(ng)]
        for g, u in enumerate(case.units):
            b.add_row([rs[g], P[g, t]], [1.0, 1.0], LE, u.p_max * com[g, t])
            b.add_row([ro[g], P[g, t]], [1.0, 1.0], LE, u.p_max * com[g, t])
        short_s = b.add_var(f"spin_short_{t}", 0.0, math.inf, penalty)
        short_o = b.add_var(f"oper_short_{t}", 0.0, math.inf, penalty)
        b.add_row(rs + [short_s], [1.0] * (ng + 1), GE, case.spinning_reserve[t])
        b.add_row(ro + [short_o], [1.0] * (ng + 1), GE, case.operating_reserve[t])
        shed = b.add_var(f"shed_{t}", 0.0, math.inf, penalty)
        spill = b.add_var(f"spill_{t}", 0.0, math.inf, penalty)
        b.add_row(list(P[:, t]) + [shed, spill], [1.0] * ng + [1.0, -1.0], EQ,
                  loads[:, t].sum() - wind[:, t].sum())
        fixed = network.ptdf_wind @ wind[:, t] - network.ptdf_load @ loads[:, t]
        for l in range(case.n_lines):
            over = b.add_var(f"over_{l}_{t}", 0.0, math.inf, penalty)
            row = network.ptdf_gen[l]
            b.add_row(list(P[:, t]) + [over], list(row) + [-1.0], LE, limits[l] - fixed[l])
            b.add_row(list(P[:, t]) + [over], list(-row) + [-1.0], LE, limits[l] + fixed[l])
            slacks.append(over)
        slacks += [short_s, short_o, shed, spill]

    sol = solve_lp(b.build())
    if not sol.optimal:
        raise ScucError(f"re-dispatch LP status: {sol.status}")
    return fixed_cost + sol.objective, float(sol.x[slacks].sum())
