import math

import numpy as np
import pytest

from instances import brute_force, random_binary_milp
from pescuc.optkernel import (EQ, GE, LE, LPBuilder, lp_residuals, solve_lp, solve_milp,
                              write_lp)


def _small_lp():
    # min -x - 2y  s.t.  x + y <= 4,  x - y >= -2,  0 <= x <= 3, y >= 0
    b = LPBuilder()
    x = b.add_var("x", 0.0, 3.0, -1.0)
    y = b.add_var("y", 0.0, math.inf, -2.0)
    b.add_row([x, y], [1.0, 1.0], LE, 4.0, "cap")
    b.add_row([x, y], [1.0, -1.0], GE, -2.0, "diff")
    return b.build()


def test_lp_optimum_and_duals_by_hand():
    # vertex x=1, y=3; both rows tight. Duals solve
    # -grad = y1*(1,1) - y2*(1,-1) -> (1,2) = (y1 - y2, y1 + y2): y1 = 1.5, y2 = 0.5
    sol = solve_lp(_small_lp())
    assert sol.optimal
    assert sol.x == pytest.approx([1.0, 3.0])
    assert sol.objective == pytest.approx(-7.0)
    assert sol.duals == pytest.approx([1.5, 0.5])


def test_duals_are_rhs_sensitivities():
    lp = _small_lp()
    base = solve_lp(lp).objective
    h = 1e-4
    for i, sign in ((0, -1.0), (1, 1.0)):
        rhs = lp.rhs.copy()
        rhs[i] += h
        lp2 = type(lp)(lp.c, lp.a, lp.senses, rhs, lp.lb, lp.ub, lp.binary)
        slope = (solve_lp(lp2).objective - base) / h
        # dual = -d obj/d rhs for <= rows, +d obj/d rhs for >= rows
        assert solve_lp(lp).duals[i] == pytest.approx(sign * slope, abs=1e-6)


def test_equality_dual_sign():
    # min x + y, x + y = 3: raising rhs raises the objective by 1
    b = LPBuilder()
    x, y = b.add_var("x", cost=1.0), b.add_var("y", cost=1.0)
    b.add_row([x, y], [1, 1], EQ, 3.0)
    sol = solve_lp(b.build())
    assert sol.duals[0] == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    b = LPBuilder()
    x = b.add_var("x", 0.0, 1.0)
    b.add_row([x], [1.0], GE, 2.0)
    assert solve_lp(b.build()).status == "infeasible"
    b = LPBuilder()
    b.add_var("x", 0.0, math.inf, -1.0)
    assert solve_lp(b.build()).status == "unbounded"


def test_residuals_small():
    lp = _small_lp()
    assert max(lp_residuals(lp, solve_lp(lp))) <= 1e-9


@pytest.mark.parametrize("method", ["bnb", "highs"])
def test_knapsack(method):
    # max 10a + 13b + 7c s.t. 3a + 4b + 2c <= 6 -> a + c = 17 (b + c = 20 is best)
    b = LPBuilder()
    xs = [b.add_var(n, 0, 1, -v, binary=True) for n, v in zip("abc", (10, 13, 7))]
    b.add_row(xs, [3, 4, 2], LE, 6)
    sol = solve_milp(b.build(), method=method)
    assert sol.objective == pytest.approx(-20.0)
    assert sol.x == pytest.approx([0, 1, 1])


@pytest.mark.parametrize("seed", range(40))
def test_bnb_matches_enumeration(seed):
    rng = np.random.default_rng(1000 + seed)
    lp = random_binary_milp(rng)
    ref = brute_force(lp)
    for method in ("bnb", "highs"):
        sol = solve_milp(lp, gap_tol=1e-9, method=method)
        if math.isinf(ref):
            assert sol.status == "infeasible"
        else:
            assert sol.objective == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_infeasible_milp():
    b = LPBuilder()
    xs = [b.add_var(f"x{k}", 0, 1, 1.0, binary=True) for k in range(3)]
    b.add_row(xs, [2, 2, 2], EQ, 3)
    assert solve_milp(b.build()).status == "infeasible"
    assert solve_milp(b.build(), method="highs").status == "infeasible"


def test_node_limit_reports_suboptimal():
    rng = np.random.default_rng(3)
    b = LPBuilder()
    w = rng.uniform(1, 10, 12)
    xs = [b.add_var(f"x{k}", 0, 1, -float(v), binary=True) for k, v in enumerate(w + rng.uniform(0, 1, 12))]
    b.add_row(xs, w, LE, w.sum() / 2)
    sol = solve_milp(b.build(), node_limit=2)
    assert sol.status in ("node_limit", "infeasible")
    if sol.x is not None:
        assert sol.suboptimal


def test_polished_solution_has_duals():
    b = LPBuilder()
    u = b.add_var("u", 0, 1, 5.0, binary=True)
    p = b.add_var("p", 0, 10, 1.0)
    b.add_row([p, u], [1, -10], LE, 0.0, "cap")
    b.add_row([p], [1], GE, 4.0, "demand")
    sol = solve_milp(b.build())
    assert sol.x == pytest.approx([1.0, 4.0])
    assert sol.duals[1] == pytest.approx(1.0)


def test_unknown_method():
    with pytest.raises(ValueError):
        solve_milp(_small_lp(), method="simplex")


def test_write_lp(tmp_path):
    path = tmp_path / "m.lp"
    b = LPBuilder()
    u = b.add_var("u", 0, 1, 5.0, binary=True)
    p = b.add_var("p", 0, 10, 1.0)
    b.add_row([p, u], [1, -10], LE, 0.0, "cap")
    write_lp(b.build(), path)
    text = path.read_text()
    for token in ("Minimize", "Subject To", "cap:", "Bounds", "Binaries", "End"):
        assert token in text


def test_single_bound_row_dual():
    b = LPBuilder()
    x = b.add_var("x", 0.0, 10.0, 1.0)
    b.add_row([x], [1.0], GE, 1.0)
    sol = solve_lp(b.build())
    assert (sol.x[0], sol.objective, sol.duals[0]) == pytest.approx((1.0, 1.0, 1.0))


def test_contradictory_rows_infeasible():
    b = LPBuilder()
    x = b.add_var("x", -math.inf, math.inf)
    b.add_row([x], [1.0], GE, 5.0)
    b.add_row([x], [1.0], LE, 3.0)
    assert solve_lp(b.build()).status == "infeasible"


def test_simplex_cap_dual():
    # min -x - y, x + y <= 1: relaxing the cap by h lowers the objective by h
    b = LPBuilder()
    x, y = b.add_var("x", cost=-1.0), b.add_var("y", cost=-1.0)
    b.add_row([x, y], [1.0, 1.0], LE, 1.0)
    sol = solve_lp(b.build())
    assert sol.objective == pytest.approx(-1.0)
    assert sol.duals[0] == pytest.approx(1.0)


def test_integral_relaxation_needs_one_node():
    b = LPBuilder()
    x = b.add_var("x", 0.0, 1.0, -1.0, binary=True)
    y = b.add_var("y", 0.0, 1.0, 1.0, binary=True)
    b.add_row([x, y], [1.0, 1.0], LE, 1.0)
    sol = solve_milp(b.build(), method="bnb")
    assert sol.nodes == 1 and sol.x == pytest.approx([1.0, 0.0])


def test_two_item_choice():
    b = LPBuilder()
    x1 = b.add_var("x1", 0.0, 1.0, -3.0, binary=True)
    x2 = b.add_var("x2", 0.0, 1.0, -2.0, binary=True)
    b.add_row([x1, x2], [1.0, 1.0], LE, 1.0)
    for method in ("bnb", "highs"):
        sol = solve_milp(b.build(), method=method)
        assert sol.objective == pytest.approx(-3.0)
        assert sol.x == pytest.approx([1.0, 0.0])


def test_bnb_is_deterministic():
    rng = np.random.default_rng(12)
    lp = random_binary_milp(rng)
    a, b = solve_milp(lp, method="bnb"), solve_milp(lp, method="bnb")
    assert a.status == b.status and a.nodes == b.nodes
    if a.optimal:
        assert a.objective == b.objective and np.array_equal(a.x, b.x)
