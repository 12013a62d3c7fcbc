"""Command-line entry point.

Subcommands
-----------
solve      --mode {det,tpe,mcs}: SolveReport JSON and schedule CSV
evaluate   CAI / ESC of a schedule file against fresh samples
benchmark  det, tpe and mcs at several reduction sizes, comparison table
gen-case   write a bundled fixture as a case file

Exit codes: 0 success, 1 usage or validation error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import cases, driver, evaluation, stochastic
from .model import CaseError, NetworkError, compute_shift_factors, load_case, save_case
from .scuc import EPSILON, ScucError

MODES = {"det": "deterministic", "tpe": "tpe", "mcs": "mcs"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str = "det"
    case: str = ""
    seed: int = 0
    n_samples: int = 10000
    n_reduced: int = 100
    epsilon: float = EPSILON
    max_iterations: int = 50
    out: str = "."
    dump_lp: str | None = None
    aggregate_only: bool = False
    milp: str = "highs"
    sizes: list = field(default_factory=lambda: [50, 100, 200])

    def settings(self):
        return driver.Settings(self.epsilon, self.max_iterations, self.milp, 1e-6, self.dump_lp)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _sizes(text):
    try:
        out = sorted({int(s) for s in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not out or out[0] < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return out


def build_parser():
    p = _Parser(prog="pescuc", description="Stochastic SCUC by Benders decomposition.")
    p.add_argument("--error-json", action="store_true",
                   help="report failures as a JSON document on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--case", required=True,
                        help="case file, or the name of a bundled fixture")
        sp.add_argument("--out", default=".", help="output directory")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--n-samples", type=_positive_int, default=10000)

    s = sub.add_parser("solve", help="solve the SCUC in one mode")
    common(s)
    s.add_argument("--mode", choices=sorted(MODES), default="det")
    s.add_argument("--n-reduced", type=_positive_int, default=100)
    s.add_argument("--epsilon", type=_positive_float, default=EPSILON)
    s.add_argument("--max-iterations", type=_positive_int, default=50)
    s.add_argument("--milp", choices=("highs", "bnb"), default="highs")
    s.add_argument("--dump-lp", metavar="DIR", help="write every LP/MILP in CPLEX-LP format")
    s.add_argument("--timings", action="store_true", help="include wall time in the report")

    e = sub.add_parser("evaluate", help="CAI and ESC of a schedule")
    common(e)
    e.add_argument("--schedule", required=True, help="schedule CSV to evaluate")
    e.add_argument("--base", help="reference schedule CSV for ESC")
    e.add_argument("--aggregate-only", action="store_true",
                   help="test only the aggregate corrective band, ignoring line limits")

    b = sub.add_parser("benchmark", help="compare det, tpe and mcs")
    common(b)
    b.add_argument("--sizes", type=_sizes, default=[50, 100, 200],
                   help="comma-separated MCS reduction sizes")
    b.add_argument("--epsilon", type=_positive_float, default=EPSILON)
    b.add_argument("--max-iterations", type=_positive_int, default=50)
    b.add_argument("--milp", choices=("highs", "bnb"), default="highs")
    b.add_argument("--timings", action="store_true", help="include wall times in the files")

    g = sub.add_parser("gen-case", help="write a bundled fixture")
    g.add_argument("name", choices=sorted(cases.BUNDLED))
    g.add_argument("--out", default=None, help="target file (default <name>.case)")
    return p


def resolve_case(spec):
    path = Path(spec)
    if path.exists():
        return load_case(path)
    stem = path.name.removesuffix(".case")
    if stem in cases.BUNDLED and path.parent == Path("."):
        return cases.BUNDLED[stem]()
    raise CaseError([("<file>", f"no such case file: {spec}")])


def _config(args):
    cfg = RunConfig(case=args.case, out=args.out)
    for name in ("mode", "seed", "n_samples", "n_reduced", "epsilon", "max_iterations",
                 "dump_lp", "aggregate_only", "milp", "sizes"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    return cfg


def _solve(case, cfg):
    st = cfg.settings()
    if cfg.mode == "det":
        return driver.solve_deterministic(case, st)
    if cfg.mode == "tpe":
        return driver.solve_stochastic_tpe(case, st)
    return driver.solve_stochastic_mcs(case, cfg.n_samples, cfg.n_reduced, cfg.seed, st)


def cmd_solve(args, out):
    cfg = _config(args)
    case = resolve_case(cfg.case)
    if cfg.mode == "mcs" and cfg.n_reduced > cfg.n_samples:
        raise UsageError(f"--n-reduced {cfg.n_reduced} exceeds --n-samples {cfg.n_samples}")
    report = _solve(case, cfg)
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    driver.write_report(report, d / "report.json", args.timings)
    driver.write_schedule_csv(case, report.schedule, d / "schedule.csv")
    print(f"{report.mode}: cost {report.schedule_cost:.2f}, expected {report.expected_cost:.2f}, "
          f"{report.iterations} iterations, {report.wall_time:.2f} s", file=out)
    return 0


def cmd_evaluate(args, out):
    cfg = _config(args)
    case = resolve_case(cfg.case)
    network = compute_shift_factors(case)
    schedule = driver.read_schedule_csv(case, args.schedule)
    base = driver.read_schedule_csv(case, args.base) if args.base else None
    scen = stochastic.sample(case, cfg.n_samples, cfg.seed)
    rep = evaluation.evaluate(case, network, schedule, scen, base, cfg.aggregate_only)
    rep.write(cfg.out)
    esc = "n/a" if rep.esc is None else f"{100 * rep.esc:.4f}%"
    print(f"CAI {100 * rep.cai:.4f}%  ESC {esc}", file=out)
    return 0


def benchmark_rows(case, cfg):
    """Rows of the comparison table; relative errors use the largest MCS run."""
    st = cfg.settings()
    runs = [("det", None, driver.solve_deterministic(case, st)),
            ("tpe", None, driver.solve_stochastic_tpe(case, st))]
    for s in cfg.sizes:
        if s > cfg.n_samples:
            raise UsageError(f"reduction size {s} exceeds --n-samples {cfg.n_samples}")
        runs.append(("mcs", s, driver.solve_stochastic_mcs(case, cfg.n_samples, s, cfg.seed, st)))
    ref = runs[-1][2].expected_cost
    rows = []
    for method, s, rep in runs:
        rows.append({
            "method": method,
            "scenarios": "" if s is None else s,
            "expected_cost": round(rep.expected_cost, 6),
            "schedule_cost": round(rep.schedule_cost, 6),
            "relative_error_pct": round(100 * abs(rep.expected_cost - ref) / ref, 6),
            "iterations": rep.iterations,
            "subproblem_solves": rep.subproblem_solves,
            "wall_time_s": rep.wall_time,
        })
    return rows


def cmd_benchmark(args, out):
    cfg = _config(args)
    case = resolve_case(cfg.case)
    rows = benchmark_rows(case, cfg)
    cols = ["method", "scenarios", "expected_cost", "schedule_cost", "relative_error_pct",
            "iterations", "subproblem_solves"]
    if args.timings:
        cols.append("wall_time_s")
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "benchmark.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    doc = {"case": case.name, "seed": cfg.seed, "n_samples": cfg.n_samples,
           "reference": f"mcs S={cfg.sizes[-1]}",
           "rows": [{k: r[k] for k in cols} for r in rows]}
    (d / "benchmark.json").write_text(json.dumps(doc, indent=1) + "\n")

    print(f"{'method':<8}{'S':>6}{'expected cost':>16}{'rel. err %':>12}"
          f"{'iters':>7}{'time s':>9}", file=out)
    for r in rows:
        print(f"{r['method']:<8}{str(r['scenarios']):>6}{r['expected_cost']:>16.2f}"
              f"{r['relative_error_pct']:>12.4f}{r['iterations']:>7}{r['wall_time_s']:>9.2f}",
              file=out)
    return 0


def cmd_gen_case(args, out):
    target = Path(args.out or f"{args.name}.case")
    target.parent.mkdir(parents=True, exist_ok=True)
    save_case(cases.BUNDLED[args.name](), target)
    print(f"wrote {target}", file=out)
    return 0


COMMANDS = {"solve": cmd_solve, "evaluate": cmd_evaluate, "benchmark": cmd_benchmark,
            "gen-case": cmd_gen_case}


def _fail(code, kind, message, as_json, err, problems=None):
    if as_json:
        doc = {"error": kind, "exit_code": code, "message": message}
        if problems:
            doc["problems"] = [{"path": p, "message": m} for p, m in problems]
        print(json.dumps(doc, indent=1), file=err)
    else:
        print(f"error: {message}", file=err)
    return code


def main(argv=None, out=None, err=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    err = err or sys.stderr
    as_json = "--error-json" in argv
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        return _fail(1, "usage", str(exc), as_json, err)
    except CaseError as exc:
        return _fail(1, "validation", str(exc), as_json, err, exc.problems)
    except NetworkError as exc:
        return _fail(1, "validation", str(exc), as_json, err,
                     [("buses", f"isolated: {list(exc.isolated_buses)}")])
    except (ScucError, ArithmeticError) as exc:
        return _fail(2, "solver", str(exc), as_json, err)
    except OSError as exc:
        return _fail(1, "io", str(exc), as_json, err)


if __name__ == "__main__":
    sys.exit(main())
