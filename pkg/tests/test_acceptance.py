"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured values.
Run standalone with ``python3 tests/test_acceptance.py`` for the same
lines without pytest.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from instances import (ResidualAudit, brute_force, random_binary_milp,  # noqa: E402
                       random_tiny_instances, six_bus_runs)
from pescuc import evaluation, optkernel, pem, stochastic  # noqa: E402
from pescuc.driver import Settings, benders  # noqa: E402
from pescuc.model import compute_shift_factors  # noqa: E402


def _line(number, ok, text):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"


def _emit(line, capsys=None):
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


# ---------------------------------------------------------------------------

def criterion_1():
    """Two-point algebra: closed-form values and weight sums."""
    x1 = pem.standard_locations(0.0, 1)
    w1 = pem.weights(*x1, 1)
    x2 = pem.standard_locations(1.0, 2)
    w2 = pem.weights(*x2, 2)
    err = max(abs(x1[0] - 1), abs(x1[1] + 1), abs(w1[0] - 0.5), abs(w1[1] - 0.5),
              abs(x2[0] - 2), abs(x2[1] + 1), abs(w2[0] - 1 / 6), abs(w2[1] - 1 / 3))
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 51))
        skews = rng.uniform(-3, 3, m)
        inputs = [pem.RandomInput(k, rng.normal(), rng.uniform(0.1, 2), s)
                  for k, s in enumerate(skews)]
        conc = pem.build_concentrations(inputs)
        worst = max(worst, abs(math.fsum(c.weight for c in conc) - 1.0))
    ok = err <= 1e-12 and worst <= 1e-12
    return ok, f"analytic error {err:.2e}, worst weight-sum error {worst:.2e} over 1000 trials"


def criterion_2():
    """Moment exactness for monomials up to degree 3 and linear maps."""
    rng = np.random.default_rng(7)
    worst_mono = 0.0
    for _ in range(200):
        mu, sd, lam = rng.normal(0, 3), rng.uniform(0.1, 3), rng.uniform(-2, 2)
        conc = pem.build_concentrations([pem.RandomInput(0, mu, sd, lam)])
        exact = [mu, mu ** 2 + sd ** 2, mu ** 3 + 3 * mu * sd ** 2 + lam * sd ** 3]
        for j in (1, 2, 3):
            est = pem.estimate_moments([(c.weight, c.location ** j) for c in conc], 1).mean
            worst_mono = max(worst_mono, abs(est - exact[j - 1]) / max(1.0, abs(exact[j - 1])))
    worst_lin = 0.0
    for _ in range(200):
        m = int(rng.integers(1, 11))
        mus, sds, lams = rng.normal(0, 5, m), rng.uniform(0.1, 2, m), rng.uniform(-2, 2, m)
        a0, a = rng.normal(), rng.normal(size=m)
        conc = pem.build_concentrations(
            [pem.RandomInput(k, mus[k], sds[k], lams[k]) for k in range(m)])
        est = pem.estimate_moments([(c.weight, a0 + a @ np.array(c.point)) for c in conc], 1).mean
        exact = a0 + a @ mus
        worst_lin = max(worst_lin, abs(est - exact) / max(1.0, abs(exact)))
    ok = worst_mono <= 1e-9 and worst_lin <= 1e-9
    return ok, f"monomial rel. err {worst_mono:.2e}, linear-map mean rel. err {worst_lin:.2e}"


def criterion_3():
    """Decomposition equals the monolithic MILP on random tiny instances."""
    instances = random_tiny_instances(100, seed=11)
    worst, slowest, cut_runs = 0.0, 0.0, 0
    for case, dev, w, ef_cost in instances:
        t0 = time.perf_counter()
        rep = benders(case, list(dev), w, Settings(milp_method="bnb"), "mcs")
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(rep.schedule_cost - ef_cost) / abs(ef_cost))
        cut_runs += sum(rep.cut_counts.values()) > 0
    ok = worst <= 1e-4 and slowest <= 1.0
    return ok, (f"worst rel. gap {worst:.2e}, slowest {slowest:.3f} s, "
                f"{cut_runs}/100 instances needed cuts")


def criterion_4(audit=None):
    """Branch and bound equals enumeration; LP residuals stay small."""
    local = ResidualAudit()
    optkernel.SOLVE_HOOKS.append(local)
    try:
        rng = np.random.default_rng(4)
        worst, mismatch = 0.0, 0
        for _ in range(500):
            lp = random_binary_milp(rng)
            ref = brute_force(lp)
            sol = optkernel.solve_milp(lp, gap_tol=1e-9, method="bnb")
            if math.isinf(ref):
                mismatch += sol.status != "infeasible"
                continue
            if not sol.optimal:
                mismatch += 1
                continue
            worst = max(worst, abs(sol.objective - ref) / max(1.0, abs(ref)))
    finally:
        optkernel.SOLVE_HOOKS.remove(local)
    resid = local.max if audit is None else max(local.max, audit.max)
    ok = mismatch == 0 and worst <= 1e-9 and resid <= 1e-6
    return ok, (f"{mismatch} status mismatches, worst rel. error {worst:.2e}, "
                f"max LP residual {resid:.2e}")


def criterion_5():
    """Shape of the six-bus comparison."""
    r = six_bus_runs()
    tpe, det, m100, m200 = r["tpe"], r["det"], r["mcs100"], r["mcs200"]
    nt = r["case"].horizon
    per_hour = {h.scenario_lp_calls / nt for h in tpe.history}
    counted = r["tpe_scenario_lps"] / (nt * tpe.iterations)
    a = per_hour == {8.0} and counted == 8.0 and tpe.n_points == 8
    rel = abs(tpe.expected_cost - m200.expected_cost) / m200.expected_cost
    b = det.expected_cost <= tpe.expected_cost and rel <= 0.02
    c = r["tpe_time"] < r["mcs100_time"]
    d = max(x.iterations for x in (det, tpe, m100, m200)) <= 10
    text = (f"(a) scenario LPs per hour per iteration {counted:g}; "
            f"(b) base {det.expected_cost:.1f} <= TPE {tpe.expected_cost:.1f}, "
            f"|TPE-MCS200|/MCS200 = {100 * rel:.3f}%; "
            f"(c) TPE {r['tpe_time']:.1f} s vs MCS100 {r['mcs100_time']:.1f} s; "
            f"(d) iterations det/tpe/mcs100/mcs200 = {det.iterations}/{tpe.iterations}/"
            f"{m100.iterations}/{m200.iterations}")
    return a and b and c and d, text


def criterion_6():
    """Out-of-sample CAI and ESC direction."""
    r = six_bus_runs()
    case = r["case"]
    net = compute_shift_factors(case)
    fresh = stochastic.sample(case, 10000, seed=20240601)
    base, tpe = r["det"].schedule, r["tpe"].schedule
    ev_base = evaluation.evaluate(case, net, base, fresh, base)
    ev_tpe = evaluation.evaluate(case, net, tpe, fresh, base)
    z = []
    for s in (base, tpe):
        a, b, se = evaluation.half_sample_check(case, net, s, fresh)
        z.append(abs(a - b) / se if se > 0 else 0.0)
    ok = ev_tpe.cai <= ev_base.cai and ev_tpe.esc >= 0 and max(z) < 3
    return ok, (f"CAI base {100 * ev_base.cai:.2f}% vs TPE {100 * ev_tpe.cai:.2f}%, "
                f"ESC {100 * ev_tpe.esc:.3f}%, half-sample |z| = {z[0]:.2f}/{z[1]:.2f}")


def _cli_outputs(tmp, tag):
    from pescuc.cli import main

    root = Path(tmp) / tag
    six = root / "six_bus.case"
    tiny = root / "tiny2.case"
    runs = [
        ["gen-case", "six_bus", "--out", str(six)],
        ["gen-case", "tiny2", "--out", str(tiny)],
        ["solve", "--case", str(six), "--mode", "det", "--out", str(root / "det")],
        ["solve", "--case", str(six), "--mode", "tpe", "--out", str(root / "tpe")],
        ["solve", "--case", str(tiny), "--mode", "mcs", "--seed", "5", "--n-samples", "400",
         "--n-reduced", "20", "--out", str(root / "mcs")],
        ["evaluate", "--case", str(six), "--schedule", str(root / "tpe" / "schedule.csv"),
         "--base", str(root / "det" / "schedule.csv"), "--seed", "3", "--n-samples", "2000",
         "--out", str(root / "eval")],
        ["benchmark", "--case", str(tiny), "--seed", "9", "--n-samples", "300",
         "--sizes", "10,30", "--out", str(root / "bench")],
    ]
    sink = open("/dev/null", "w")
    try:
        codes = [main(argv, out=sink) for argv in runs]
    finally:
        sink.close()
    files = {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
    return codes, files


def criterion_7(tmp):
    """Byte-identical outputs across two runs of every subcommand."""
    c1, f1 = _cli_outputs(tmp, "run1")
    c2, f2 = _cli_outputs(tmp, "run2")
    same = f1.keys() == f2.keys() and all(f1[k] == f2[k] for k in f1)
    ok = same and set(c1) == {0} and set(c2) == {0}
    diff = [str(k) for k in f1 if f1.get(k) != f2.get(k)]
    return ok, f"{len(f1)} files compared, exit codes {sorted(set(c1 + c2))}, differing: {diff}"


# ---------------------------------------------------------------------------

def _check(number, result, capsys):
    ok, text = result
    _emit(_line(number, ok, text), capsys)
    assert ok, text


def test_criterion_1_tpe_algebra(capsys):
    _check(1, criterion_1(), capsys)


def test_criterion_2_moment_exactness(capsys):
    _check(2, criterion_2(), capsys)


def test_criterion_3_oracle_equivalence(capsys):
    _check(3, criterion_3(), capsys)


def test_criterion_4_milp_kernel(capsys, residual_audit):
    _check(4, criterion_4(residual_audit), capsys)


def test_criterion_5_six_bus_shape(capsys):
    _check(5, criterion_5(), capsys)


def test_criterion_6_evaluation_direction(capsys):
    _check(6, criterion_6(), capsys)


def test_criterion_7_determinism(capsys, tmp_path):
    _check(7, criterion_7(tmp_path), capsys)


if __name__ == "__main__":
    import tempfile

    audit = ResidualAudit()
    optkernel.SOLVE_HOOKS.append(audit)
    results = [criterion_1(), criterion_2(), criterion_3(), None, criterion_5(), criterion_6()]
    with tempfile.TemporaryDirectory() as tmp:
        results.append(criterion_7(tmp))
    results[3] = criterion_4(audit)
    for k, (ok, text) in enumerate(results, 1):
        print(_line(k, ok, text))
    sys.exit(0 if all(ok for ok, _ in results) else 1)
