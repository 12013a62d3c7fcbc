"""Small LP / MILP kernel.

LPs are solved with HiGHS through :func:`scipy.optimize.linprog`; duals are
returned as nonnegative multipliers for binding inequalities (minimisation),
i.e. ``dual = -d(obj)/d(rhs)`` for ``<=`` rows and ``+d(obj)/d(rhs)`` for
``>=`` and ``=`` rows.  Mixed-binary programs go through an in-house
best-bound branch and bound, or through HiGHS' own MIP when asked.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
INT_TOL = 1e-6

LE, EQ, GE = "<=", "=", ">="

# callables invoked as hook(lp, solution) after every optimal LP solve
SOLVE_HOOKS = []


@dataclass
class LinearProgram:
    c: np.ndarray
    a: sp.csr_matrix
    senses: np.ndarray      # array of LE / EQ / GE
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    binary: np.ndarray      # bool mask
    var_names: list = field(default_factory=list)
    row_names: list = field(default_factory=list)
    obj_offset: float = 0.0

    @property
    def n_vars(self):
        return self.c.size

    @property
    def n_rows(self):
        return self.rhs.size

    def with_bounds(self, lb, ub):
        return LinearProgram(self.c, self.a, self.senses, self.rhs, lb, ub, self.binary,
                             self.var_names, self.row_names, self.obj_offset)


@dataclass
class Solution:
    status: str                     # optimal | infeasible | unbounded | node_limit | error
    objective: float = math.nan
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    nodes: int = 0
    suboptimal: bool = False
    bound: float = math.nan

    @property
    def optimal(self):
        return self.status == "optimal"


class LPBuilder:
    """Incremental construction of a :class:`LinearProgram`."""

    def __init__(self):
        self.c, self.lb, self.ub, self.bin, self.var_names = [], [], [], [], []
        self._ri, self._ci, self._v = [], [], []
        self.senses, self.rhs, self.row_names = [], [], []
        self.obj_offset = 0.0

    def add_var(self, name, lb=0.0, ub=math.inf, cost=0.0, binary=False):
        self.c.append(cost)
        self.lb.append(lb)
        self.ub.append(ub)
        self.bin.append(binary)
        self.var_names.append(name)
        return len(self.c) - 1

    def add_vars(self, prefix, shape, lb=0.0, ub=math.inf, cost=0.0, binary=False):
        idx = np.empty(shape, dtype=int)
        for pos in np.ndindex(*shape):
            label = prefix + "_" + "_".join(map(str, pos))
            idx[pos] = self.add_var(label, lb, ub, cost, binary)
        return idx

    def add_row(self, cols, vals, sense, rhs, name=None):
        row = len(self.rhs)
        for j, v in zip(cols, vals):
            if v != 0.0:
                self._ri.append(row)
                self._ci.append(int(j))
                self._v.append(float(v))
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self.row_names.append(name or f"r{row}")
        return row

    def set_cost(self, j, cost):
        self.c[j] = cost

    def build(self):
        n, m = len(self.c), len(self.rhs)
        a = sp.csr_matrix((self._v, (self._ri, self._ci)), shape=(m, n))
        a.sum_duplicates()
        return LinearProgram(
            c=np.array(self.c, dtype=float), a=a,
            senses=np.array(self.senses, dtype=object),
            rhs=np.array(self.rhs, dtype=float),
            lb=np.array(self.lb, dtype=float), ub=np.array(self.ub, dtype=float),
            binary=np.array(self.bin, dtype=bool),
            var_names=list(self.var_names), row_names=list(self.row_names),
            obj_offset=self.obj_offset)


def solve_lp(lp):
    """Solve the continuous relaxation of ``lp``.

    Infeasibility and unboundedness are reported through ``status``.
    """
    le = lp.senses == LE
    ge = lp.senses == GE
    eq = lp.senses == EQ
    ineq = le | ge
    sign = np.where(ge, -1.0, 1.0)
    a_ub = lp.a[ineq].multiply(sign[ineq][:, None]).tocsr() if ineq.any() else None
    b_ub = (lp.rhs * sign)[ineq] if ineq.any() else None
    a_eq = lp.a[eq] if eq.any() else None
    b_eq = lp.rhs[eq] if eq.any() else None
    bounds = np.column_stack([lp.lb, lp.ub])

    res = linprog(lp.c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return Solution("infeasible")
    if res.status == 3:
        return Solution("unbounded")
    if res.status != 0:
        return Solution("error")

    duals = np.zeros(lp.n_rows)
    if ineq.any():
        duals[ineq] = -res.ineqlin.marginals
    if eq.any():
        duals[eq] = res.eqlin.marginals
    reduced = res.lower.marginals + res.upper.marginals
    sol = Solution("optimal", float(res.fun) + lp.obj_offset, np.asarray(res.x),
                   duals, reduced, nodes=1)
    for hook in SOLVE_HOOKS:
        hook(lp, sol)
    return sol


def lp_residuals(lp, sol):
    """Optimality residuals of an LP solution.

    Returns ``(primal, dual, gap)``: the largest constraint or bound
    violation, the largest complementarity or dual-sign violation, and the
    absolute primal-dual objective gap.
    """
    x, y = sol.x, sol.duals
    ax = lp.a @ x
    le, ge, eq = lp.senses == LE, lp.senses == GE, lp.senses == EQ
    viol = np.concatenate([
        np.maximum(ax[le] - lp.rhs[le], 0.0),
        np.maximum(lp.rhs[ge] - ax[ge], 0.0),
        np.abs(ax[eq] - lp.rhs[eq]),
        np.maximum(lp.lb - x, 0.0),
        np.maximum(x - lp.ub, 0.0),
    ])
    primal = float(viol.max(initial=0.0))

    # row multipliers in "obj gradient" form: c = A^T u + r
    u = np.where(le, -y, y)
    r = lp.c - lp.a.T @ u
    slack = np.abs(ax - lp.rhs)
    comp_rows = np.abs(y[~eq]) * slack[~eq]
    r_lo = np.maximum(r, 0.0)
    r_hi = np.maximum(-r, 0.0)
    # against an infinite bound a reduced cost is a dual infeasibility
    with np.errstate(invalid="ignore"):
        gap_lo = np.where(np.isfinite(lp.lb), r_lo * np.abs(x - lp.lb), r_lo)
        gap_hi = np.where(np.isfinite(lp.ub), r_hi * np.abs(lp.ub - x), r_hi)
    sign_viol = np.maximum(-y[~eq], 0.0)
    comp = float(np.concatenate([comp_rows, sign_viol, gap_lo, gap_hi]).max(initial=0.0))

    dual_obj = float(u @ lp.rhs)
    dual_obj += float(np.sum(np.where(np.isfinite(lp.lb), r_lo * np.nan_to_num(lp.lb), 0.0)))
    dual_obj -= float(np.sum(np.where(np.isfinite(lp.ub), r_hi * np.nan_to_num(lp.ub), 0.0)))
    primal_obj = float(lp.c @ x)
    return primal, comp, abs(primal_obj - dual_obj)


def _most_fractional(x, binary):
    idx = np.flatnonzero(binary)
    frac = np.abs(x[idx] - np.round(x[idx]))
    frac_mask = frac > INT_TOL
    if not frac_mask.any():
        return None
    score = np.minimum(x[idx] - np.floor(x[idx]), np.ceil(x[idx]) - x[idx])
    score[~frac_mask] = -1.0
    return int(idx[int(np.argmax(score))])  # argmax returns the lowest index on ties


def _cutoff(incumbent, gap_tol):
    if math.isinf(incumbent):
        return incumbent
    return incumbent - gap_tol * max(1.0, abs(incumbent))


def _polish(lp, x):
    """Fix binaries at their rounded values and re-solve the LP."""
    lb, ub = lp.lb.copy(), lp.ub.copy()
    fixed = np.round(x[lp.binary])
    lb[lp.binary] = fixed
    ub[lp.binary] = fixed
    sol = solve_lp(lp.with_bounds(lb, ub))
    if sol.optimal:
        sol.x[lp.binary] = fixed
    return sol


def solve_milp(lp, gap_tol=1e-6, node_limit=10**6, method="bnb"):
    """Minimise ``lp`` with its binary marks enforced.

    ``method="bnb"`` runs best-bound branch and bound branching on the most
    fractional binary (lowest index on ties, down branch first).
    ``method="highs"`` hands the model to HiGHS' MIP solver.  Either way the
    returned solution carries LP duals of the problem with binaries fixed.
    """
    if method == "highs":
        return _solve_milp_highs(lp, gap_tol)
    if method != "bnb":
        raise ValueError(f"unknown MILP method {method!r}")

    root = solve_lp(lp)
    if not root.optimal:
        root.nodes = 1
        return root

    incumbent, inc_x = math.inf, None
    heap = [(root.objective, 0, lp.lb.copy(), lp.ub.copy(), root)]
    seq, nodes = 1, 0
    best_bound = root.objective
    while heap:
        bound, _, lb, ub, sol = heapq.heappop(heap)
        best_bound = bound
        if bound >= _cutoff(incumbent, gap_tol):
            break
        nodes += 1
        if nodes > node_limit:
            heapq.heappush(heap, (bound, seq, lb, ub, sol))
            break
        j = _most_fractional(sol.x, lp.binary)
        if j is None:
            incumbent, inc_x = sol.objective, sol.x
            continue
        for val in (0.0, 1.0):
            clb, cub = lb.copy(), ub.copy()
            clb[j] = cub[j] = val
            child = solve_lp(lp.with_bounds(clb, cub))
            if child.optimal and child.objective < _cutoff(incumbent, gap_tol):
                if _most_fractional(child.x, lp.binary) is None:
                    incumbent, inc_x = child.objective, child.x
                else:
                    heapq.heappush(heap, (child.objective, seq, clb, cub, child))
                    seq += 1
    else:
        best_bound = incumbent

    if inc_x is None:
        status = "node_limit" if nodes > node_limit else "infeasible"
        return Solution(status, nodes=nodes)
    out = _polish(lp, inc_x)
    out.nodes = max(nodes, 1)
    out.bound = min(best_bound, out.objective)
    if nodes > node_limit:
        out.status = "node_limit"
        out.suboptimal = True
    return out


def _solve_milp_highs(lp, gap_tol):
    lo = np.full(lp.n_rows, -np.inf)
    hi = np.full(lp.n_rows, np.inf)
    le, ge, eq = lp.senses == LE, lp.senses == GE, lp.senses == EQ
    hi[le | eq] = lp.rhs[le | eq]
    lo[ge | eq] = lp.rhs[ge | eq]
    kw = dict(constraints=LinearConstraint(lp.a, lo, hi), integrality=lp.binary.astype(int),
              bounds=Bounds(lp.lb, lp.ub))
    res = milp(lp.c, **kw, options={"mip_rel_gap": gap_tol})
    if res.status == 2:
        # HiGHS presolve occasionally declares feasible models infeasible
        res = milp(lp.c, **kw, options={"mip_rel_gap": gap_tol, "presolve": False})
    if res.status == 2 or res.x is None and res.status != 0:
        return Solution("infeasible" if res.status == 2 else "error")
    out = _polish(lp, res.x)
    out.nodes = int(getattr(res, "mip_node_count", 1) or 1)
    out.bound = float(getattr(res, "mip_dual_bound", out.objective))
    return out


def write_lp(lp, path, name="model"):
    """Dump ``lp`` in CPLEX LP text format."""
    names = lp.var_names or [f"x{j}" for j in range(lp.n_vars)]
    rows = lp.row_names or [f"r{i}" for i in range(lp.n_rows)]

    def expr(cols, vals):
        parts = []
        for j, v in zip(cols, vals):
            sign = "-" if v < 0 else "+"
            parts.append(f"{sign} {abs(v):.12g} {names[j]}")
        text = " ".join(parts) if parts else "0 " + names[0]
        return text[2:] if text.startswith("+ ") else text

    out = [f"\\ {name}", "Minimize", " obj: " + expr(np.flatnonzero(lp.c), lp.c[lp.c != 0]),
           "Subject To"]
    a = lp.a.tocsr()
    for i in range(lp.n_rows):
        lo, hi = a.indptr[i], a.indptr[i + 1]
        out.append(f" {rows[i]}: {expr(a.indices[lo:hi], a.data[lo:hi])} "
                   f"{lp.senses[i]} {lp.rhs[i]:.12g}")
    out.append("Bounds")
    for j in range(lp.n_vars):
        lo = "-inf" if np.isneginf(lp.lb[j]) else f"{lp.lb[j]:.12g}"
        hi = "+inf" if np.isposinf(lp.ub[j]) else f"{lp.ub[j]:.12g}"
        out.append(f" {lo} <= {names[j]} <= {hi}")
    if lp.binary.any():
        out.append("Binaries")
        out.extend(" " + names[j] for j in np.flatnonzero(lp.binary))
    out.append("End")
    Path(path).write_text("\n".join(out) + "\n")
