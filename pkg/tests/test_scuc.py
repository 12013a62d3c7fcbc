import dataclasses
import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from pescuc import cases
from pescuc.model import compute_shift_factors
from pescuc.scuc import (DegenerateCut, MasterInfeasible, ScucError, make_network_cut,
                         make_scenario_cut, make_schedule, network_check, redispatch_cost,
                         scenario_check, schedule_cost, solve_master)


def _runs_ok(row, init_status, min_on, min_off):
    """Minimum up/down times by run lengths, counting the initial run."""
    runs, state, length = [], init_status > 0, abs(init_status)
    for v in row:
        if bool(v) == state:
            length += 1
        else:
            runs.append((state, length))
            state, length = bool(v), 1
    # every run that ends inside the horizon must be long enough
    return all(length >= (min_on if on else min_off) for on, length in runs)


def _dispatch_cost(case, com):
    """Cheapest dispatch for a fixed commitment (ramping, reserves), or inf."""
    ng, nt = com.shape
    net = case.net_load()
    nseg = [len(u.cost_segments) for u in case.units]
    # variables: segment outputs per unit/hour
    idx, c, bounds = {}, [], []
    for g, u in enumerate(case.units):
        for t in range(nt):
            for k, w in enumerate(u.segment_widths()):
                idx[g, t, k] = len(c)
                c.append(u.marginal_costs()[k])
                bounds.append((0, w * com[g, t]))
    n = len(c)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []

    def p_row(g, t, sign=1.0):
        r = np.zeros(n)
        for k in range(nseg[g]):
            r[idx[g, t, k]] = sign
        return r

    for t in range(nt):
        a_eq.append(sum(p_row(g, t) for g in range(ng)))
        b_eq.append(net[t])
        for g, u in enumerate(case.units):
            a_ub.append(-p_row(g, t))
            b_ub.append(-u.p_min * com[g, t])
            prev_on = (case.units[g].initially_on if t == 0 else com[g, t - 1])
            start = com[g, t] and not prev_on
            stop = prev_on and not com[g, t]
            up = u.p_min if start else u.ramp_up
            dn = u.p_min if stop else u.ramp_down
            if t == 0:
                a_ub.append(p_row(g, t))
                b_ub.append(up + u.initial_output)
                a_ub.append(-p_row(g, t))
                b_ub.append(dn - u.initial_output)
            else:
                a_ub.append(p_row(g, t) - p_row(g, t - 1))
                b_ub.append(up)
                a_ub.append(p_row(g, t - 1) - p_row(g, t))
                b_ub.append(dn)
    res = linprog(c, A_ub=np.array(a_ub), b_ub=b_ub, A_eq=np.array(a_eq), b_eq=b_eq,
                  bounds=bounds, method="highs")
    return res.fun if res.status == 0 else np.inf


@pytest.mark.parametrize("make", [cases.tiny2, cases.triangle3])
def test_master_matches_commitment_enumeration(make):
    case = make()
    ng, nt = case.n_units, case.horizon
    best = np.inf
    for bits in itertools.product((0, 1), repeat=ng * nt):
        com = np.array(bits).reshape(ng, nt)
        if not all(_runs_ok(com[g], u.initial_status, u.min_on, u.min_off)
                   for g, u in enumerate(case.units)):
            continue
        energy = _dispatch_cost(case, com)
        if np.isinf(energy):
            continue
        fixed = schedule_cost(case, com, np.zeros((ng, nt)))
        best = min(best, energy + fixed)
    for method in ("bnb", "highs"):
        assert solve_master(case, method=method).total_cost == pytest.approx(best, rel=1e-9)


def test_schedule_cost_recomputes_master_objective():
    case = cases.six_bus()
    s = solve_master(case, method="highs")
    again = make_schedule(case, s.commitment, s.dispatch)
    assert again.total_cost == pytest.approx(s.total_cost, rel=1e-9)
    assert np.allclose(s.dispatch.sum(axis=0), case.net_load())


def test_master_respects_initial_status():
    case = cases.six_bus()
    s = solve_master(case, method="highs")
    # G1 starts on with 4 h of a 4 h minimum: free from hour 1; G2 is off for
    # 3 h with a 2 h minimum down: also free
    assert s.commitment.shape == (3, 24)
    for g, u in enumerate(case.units):
        on = s.commitment[g] > 0
        assert np.all(s.dispatch[g, on] >= u.p_min - 1e-6)
        assert np.all(s.dispatch[g, on] <= u.p_max + 1e-6)
        assert np.all(s.dispatch[g, ~on] == 0)


def test_reserve_requirement_too_large_names_hour():
    case = cases.six_bus()
    spin = case.spinning_reserve.copy()
    spin[5] = 500.0
    bad = dataclasses.replace(case, spinning_reserve=spin)
    with pytest.raises(MasterInfeasible, match="hour 6"):
        solve_master(bad)


def _overloaded():
    case = cases.six_bus()
    s = solve_master(case, method="highs")
    net = compute_shift_factors(case)
    for t in range(case.horizon):
        r = network_check(net, case, s, t)
        if r.violated:
            return case, net, s, r
    raise AssertionError("expected an overloaded hour in the unconstrained schedule")


def test_network_check_matches_max_overload():
    case, net, s, r = _overloaded()
    t = r.hour
    flows = net.flows(s.dispatch[:, t], case.load_matrix()[:, t], case.wind_matrix()[:, t])
    limits = np.array([ln.flow_limit for ln in case.lines])
    assert r.objective == pytest.approx(max(0.0, np.max(np.abs(flows) - limits)))
    assert np.all(r.line_duals_up >= 0) and np.all(r.line_duals_dn >= 0)
    assert r.line_duals_up.sum() + r.line_duals_dn.sum() == pytest.approx(1.0)


def test_network_cut_is_a_subgradient_bound():
    case, net, s, r = _overloaded()
    t = r.hour
    cut = make_network_cut(net, r, s)
    assert cut.evaluate(s.dispatch[:, t], s.commitment[:, t]) == pytest.approx(r.objective)
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = s.dispatch.copy()
        p[:, t] += rng.normal(0, 20, case.n_units)
        other = make_schedule(case, s.commitment, p)
        s_new = network_check(net, case, other, t).objective
        assert s_new >= cut.evaluate(p[:, t], s.commitment[:, t]) - 1e-7


def test_no_cut_without_violation():
    case = cases.tiny2()
    net = compute_shift_factors(case)
    s = solve_master(case)
    r = network_check(net, case, s, 0)
    assert not r.violated
    with pytest.raises(ValueError, match="not violated"):
        make_network_cut(net, r, s)


def test_degenerate_network_cut():
    # load at the slack bus only: no dispatch can change the flow caused by
    # wind at bus 2 exceeding the line limit
    case = cases.tiny2()
    case = dataclasses.replace(case, units=(dataclasses.replace(case.units[0]),
                                            dataclasses.replace(case.units[1], bus=1)))
    net = compute_shift_factors(case)
    s = solve_master(case)
    r = network_check(net, case, s, 2)
    assert r.violated
    with pytest.raises(DegenerateCut):
        make_network_cut(net, r, s)


def _scenario_violation():
    case = cases.six_bus()
    net = compute_shift_factors(case)
    s = solve_master(case, method="highs")
    loads, wind = case.realize([1.25, 1.25, 1.25, 0.6])
    t = 16
    r = scenario_check(net, case, s, t, loads[:, t], wind[:, t])
    assert r.violated
    return case, net, s, loads[:, t], wind[:, t], r


def test_scenario_duals_nonnegative():
    *_, r = _scenario_violation()
    for d in (r.line_duals_up, r.line_duals_dn, r.ramp_up_duals, r.ramp_dn_duals,
              r.cap_max_duals, r.cap_min_duals):
        assert np.all(d >= -1e-9)


def test_scenario_cut_is_a_subgradient_bound():
    case, net, s, loads, wind, r = _scenario_violation()
    t = r.hour
    cut = make_scenario_cut(case, [r], [1.0], s)
    assert cut.evaluate(s.dispatch[:, t], s.commitment[:, t]) == pytest.approx(r.objective)
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(200):
        p, i = s.dispatch.copy(), s.commitment.copy()
        i[:, t] = rng.uniform(0, 1, case.n_units)
        p[:, t] = np.clip(p[:, t] + rng.normal(0, 15, case.n_units), 0, None)
        trial = dataclasses.replace(s, dispatch=p, commitment=i)
        try:
            value = scenario_check(net, case, trial, t, loads, wind).objective
        except ScucError:
            continue  # outside the domain of the check LP
        checked += 1
        assert value >= cut.evaluate(p[:, t], i[:, t]) - 1e-6
    assert checked >= 20


def test_check_lp_outside_domain_raises():
    case, net, s, loads, wind, r = _scenario_violation()
    com = s.commitment.copy()
    disp = s.dispatch.copy()
    g = int(np.argmax(com[:, r.hour]))
    disp[g, r.hour] = 0.0  # committed but far below the corrective band reach of p_min
    trial = dataclasses.replace(s, dispatch=disp)
    with pytest.raises(ScucError, match=f"hour {r.hour + 1}"):
        scenario_check(net, case, trial, r.hour, loads, wind)


def test_weighted_scenario_cut_averages():
    case, net, s, loads, wind, r = _scenario_violation()
    r0 = scenario_check(net, case, s, r.hour, loads / 1.25, wind / 0.6)
    cut = make_scenario_cut(case, [r, r0], [0.25, 0.75], s)
    assert cut.value == pytest.approx(0.25 * r.objective + 0.75 * r0.objective)
    with pytest.raises(ValueError, match="sum"):
        make_scenario_cut(case, [r, r0], [0.5, 0.6], s)


def test_redispatch_at_forecast_reproduces_schedule_cost():
    from pescuc.driver import solve_deterministic

    case = cases.six_bus()
    rep = solve_deterministic(case)
    net = compute_shift_factors(case)
    cost, slack = redispatch_cost(case, net, rep.schedule, case.load_matrix(), case.wind_matrix())
    assert slack == pytest.approx(0.0, abs=1e-6)
    assert cost == pytest.approx(rep.schedule_cost, rel=1e-9)


def test_redispatch_penalises_shortfall():
    case = cases.tiny2()
    net = compute_shift_factors(case)
    s = solve_master(case)
    loads, wind = case.realize([1.5, 1.0])
    cost, slack = redispatch_cost(case, net, s, loads, wind)
    assert slack > 0
    assert cost > s.total_cost + 1000 * slack * 0.99
