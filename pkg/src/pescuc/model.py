"""System data model, validation, DC shift factors and case-file I/O.

A case file is a single JSON document.  Every quantity is in MW, hours or
$/MWh; line reactances are per-unit on a 100 MVA base.  Shift factors are
dimensionless so the base never enters the network algebra.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

BASE_MVA = 100.0
CORRECTIVE_FRACTION = 10.0 / 60.0
DISTRIBUTIONS = ("normal", "truncated-normal")


class CaseError(ValueError):
    """Raised when a case fails schema or invariant validation.

    ``problems`` holds one ``(field_path, message)`` pair per failure.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"{path}: {msg}" for path, msg in self.problems]
        super().__init__("invalid case:\n  " + "\n  ".join(lines))


class NetworkError(ValueError):
    def __init__(self, message, isolated_buses=()):
        self.isolated_buses = tuple(isolated_buses)
        super().__init__(message)


@dataclass(frozen=True)
class ThermalUnit:
    id: str
    bus: int
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float
    min_on: int
    min_off: int
    initial_status: int
    initial_output: float
    cost_segments: tuple  # ((breakpoint_mw, marginal_cost), ...) from 0 MW
    no_load_cost: float = 0.0
    startup_cost: float = 0.0
    shutdown_cost: float = 0.0
    corrective_up: float | None = None
    corrective_dn: float | None = None

    def __post_init__(self):
        segs = tuple((float(b), float(c)) for b, c in self.cost_segments)
        object.__setattr__(self, "cost_segments", segs)
        if self.corrective_up is None:
            object.__setattr__(self, "corrective_up", CORRECTIVE_FRACTION * self.ramp_up)
        if self.corrective_dn is None:
            object.__setattr__(self, "corrective_dn", CORRECTIVE_FRACTION * self.ramp_down)

    @property
    def initially_on(self):
        return self.initial_status > 0

    def segment_widths(self):
        bps = [0.0] + [b for b, _ in self.cost_segments]
        return np.diff(bps)

    def marginal_costs(self):
        return np.array([c for _, c in self.cost_segments])

    def energy_cost(self, p):
        """Integral of the marginal cost curve from 0 to ``p`` MW."""
        p = np.asarray(p, dtype=float)
        total = np.zeros_like(p)
        lo = 0.0
        for bp, mc in self.cost_segments:
            total = total + mc * np.clip(p - lo, 0.0, bp - lo)
            lo = bp
        return total


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: int
    to_bus: int
    reactance: float
    flow_limit: float


@dataclass(frozen=True)
class UncertainProfile:
    """A load point or wind farm: hourly forecast plus its uncertainty."""

    id: str
    bus: int
    hourly_mean: np.ndarray
    sigma_fraction: float
    distribution: str = "normal"
    skewness: float = 0.0

    def __post_init__(self):
        arr = np.array(self.hourly_mean, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "hourly_mean", arr)


# Same fields for both kinds; the aliases keep call sites readable.
LoadPoint = UncertainProfile
WindFarm = UncertainProfile


@dataclass(frozen=True)
class SystemCase:
    buses: tuple
    lines: tuple
    units: tuple
    loads: tuple
    wind: tuple
    spinning_reserve: np.ndarray
    operating_reserve: np.ndarray
    slack_bus: int
    horizon: int = 24
    name: str = "case"

    def __post_init__(self):
        for attr in ("spinning_reserve", "operating_reserve"):
            arr = np.array(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        for attr in ("buses", "lines", "units", "loads", "wind"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    @property
    def n_units(self):
        return len(self.units)

    @property
    def n_buses(self):
        return len(self.buses)

    @property
    def n_lines(self):
        return len(self.lines)

    def bus_index(self, bus):
        return self.buses.index(bus)

    def load_matrix(self):
        """Forecast load, shape (n_loads, horizon)."""
        if not self.loads:
            return np.zeros((0, self.horizon))
        return np.vstack([ld.hourly_mean for ld in self.loads])

    def wind_matrix(self):
        if not self.wind:
            return np.zeros((0, self.horizon))
        return np.vstack([w.hourly_mean for w in self.wind])

    def net_load(self):
        return self.load_matrix().sum(axis=0) - self.wind_matrix().sum(axis=0)

    @property
    def uncertain(self):
        """Loads first, then wind farms: the order of every deviate vector."""
        return self.loads + self.wind

    def realize(self, deviates):
        """Scale each profile by its deviate; returns (loads, wind) matrices."""
        deviates = np.asarray(deviates, dtype=float)
        nl = len(self.loads)
        loads = self.load_matrix() * deviates[:nl, None]
        wind = np.maximum(self.wind_matrix() * deviates[nl:, None], 0.0)
        return loads, wind


@dataclass(frozen=True)
class NetworkModel:
    """Shift factors and incidence matrices (buses x devices)."""

    sf: np.ndarray
    k_p: np.ndarray
    k_d: np.ndarray
    k_w: np.ndarray
    slack_index: int
    ptdf_gen: np.ndarray = field(repr=False, default=None)
    ptdf_load: np.ndarray = field(repr=False, default=None)
    ptdf_wind: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "ptdf_gen", self.sf @ self.k_p)
        object.__setattr__(self, "ptdf_load", self.sf @ self.k_d)
        object.__setattr__(self, "ptdf_wind", self.sf @ self.k_w)
        for name in ("sf", "k_p", "k_d", "k_w", "ptdf_gen", "ptdf_load", "ptdf_wind"):
            getattr(self, name).setflags(write=False)

    def flows(self, gen, loads, wind):
        """Line flows (MW, from->to positive) for one hour of injections."""
        return self.ptdf_gen @ gen + self.ptdf_wind @ wind - self.ptdf_load @ loads


def _incidence(buses, device_buses):
    k = np.zeros((len(buses), len(device_buses)))
    for j, b in enumerate(device_buses):
        k[buses.index(b), j] = 1.0
    return k


def _components(buses, lines):
    adj = {b: [] for b in buses}
    for ln in lines:
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    seen, comps = set(), []
    for start in buses:
        if start in seen:
            continue
        comp, queue = [], deque([start])
        seen.add(start)
        while queue:
            b = queue.popleft()
            comp.append(b)
            for nb in adj[b]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        comps.append(sorted(comp))
    return comps


def compute_shift_factors(case):
    """DC shift factors with injection at each bus withdrawn at the slack.

    ``SF[l, b]`` is the MW flow on line ``l`` (from->to positive) caused by
    1 MW injected at bus ``b`` and withdrawn at the slack bus.
    """
    buses = list(case.buses)
    comps = _components(buses, case.lines)
    if len(comps) > 1:
        main = next(c for c in comps if case.slack_bus in c)
        isolated = sorted(b for c in comps if c is not main for b in c)
        raise NetworkError(
            f"network is disconnected: buses {isolated} are not connected to "
            f"slack bus {case.slack_bus}", isolated)

    nb, nl = len(buses), len(case.lines)
    a = np.zeros((nl, nb))
    for k, ln in enumerate(case.lines):
        a[k, buses.index(ln.from_bus)] = 1.0
        a[k, buses.index(ln.to_bus)] = -1.0
    b_line = np.array([1.0 / ln.reactance for ln in case.lines])
    b_bus = a.T @ (b_line[:, None] * a)

    slack = buses.index(case.slack_bus)
    keep = [i for i in range(nb) if i != slack]
    sf = np.zeros((nl, nb))
    if keep:
        b_red = b_bus[np.ix_(keep, keep)]
        try:
            x_red = np.linalg.solve(b_red, np.eye(len(keep)))
        except np.linalg.LinAlgError as exc:
            raise NetworkError(f"reduced susceptance matrix is singular: {exc}") from exc
        sf[:, keep] = (b_line[:, None] * a[:, keep]) @ x_red

    return NetworkModel(
        sf=sf,
        k_p=_incidence(buses, [u.bus for u in case.units]),
        k_d=_incidence(buses, [ld.bus for ld in case.loads]),
        k_w=_incidence(buses, [w.bus for w in case.wind]),
        slack_index=slack,
    )


def dc_power_flow(case, injections):
    """Direct DC solve for a balanced nodal injection vector (MW).

    Independent of the shift-factor route; used to cross-check it.
    """
    buses = list(case.buses)
    nb = len(buses)
    b_bus = np.zeros((nb, nb))
    for ln in case.lines:
        i, j = buses.index(ln.from_bus), buses.index(ln.to_bus)
        y = 1.0 / ln.reactance
        b_bus[i, i] += y
        b_bus[j, j] += y
        b_bus[i, j] -= y
        b_bus[j, i] -= y
    slack = buses.index(case.slack_bus)
    keep = [i for i in range(nb) if i != slack]
    theta = np.zeros(nb)
    p = np.asarray(injections, dtype=float) / BASE_MVA
    theta[keep] = np.linalg.solve(b_bus[np.ix_(keep, keep)], p[keep])
    return np.array([
        (theta[buses.index(ln.from_bus)] - theta[buses.index(ln.to_bus)]) / ln.reactance
        for ln in case.lines
    ]) * BASE_MVA


# --------------------------------------------------------------------------
# validation

_NUM = {"type": "number"}
_PROFILE = {
    "type": "object",
    "required": ["id", "bus", "hourly_mean"],
    "properties": {
        "id": {"type": "string"},
        "bus": {"type": "integer"},
        "hourly_mean": {"type": "array", "items": _NUM, "minItems": 1},
        "sigma_fraction": _NUM,
        "distribution": {"enum": list(DISTRIBUTIONS)},
        "skewness": _NUM,
    },
    "additionalProperties": False,
}

CASE_SCHEMA = {
    "type": "object",
    "required": ["buses", "lines", "units", "loads", "wind", "reserves", "slack_bus", "horizon"],
    "properties": {
        "name": {"type": "string"},
        "buses": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "lines": {"type": "array", "items": {
            "type": "object",
            "required": ["id", "from_bus", "to_bus", "reactance", "flow_limit"],
            "properties": {
                "id": {"type": "string"},
                "from_bus": {"type": "integer"},
                "to_bus": {"type": "integer"},
                "reactance": _NUM,
                "flow_limit": _NUM,
            },
            "additionalProperties": False,
        }},
        "units": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "required": ["id", "bus", "p_min", "p_max", "ramp_up", "ramp_down", "min_on",
                         "min_off", "initial_status", "initial_output", "cost_segments"],
            "properties": {
                "id": {"type": "string"},
                "bus": {"type": "integer"},
                "p_min": _NUM, "p_max": _NUM,
                "ramp_up": _NUM, "ramp_down": _NUM,
                "min_on": {"type": "integer"}, "min_off": {"type": "integer"},
                "initial_status": {"type": "integer"},
                "initial_output": _NUM,
                "cost_segments": {"type": "array", "minItems": 1, "items": {
                    "type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
                "no_load_cost": _NUM,
                "startup_cost": _NUM,
                "shutdown_cost": _NUM,
                "corrective_up": _NUM,
                "corrective_dn": _NUM,
            },
            "additionalProperties": False,
        }},
        "loads": {"type": "array", "items": _PROFILE},
        "wind": {"type": "array", "items": _PROFILE},
        "reserves": {
            "type": "object",
            "required": ["spinning", "operating"],
            "properties": {
                "spinning": {"type": "array", "items": _NUM},
                "operating": {"type": "array", "items": _NUM},
            },
            "additionalProperties": False,
        },
        "slack_bus": {"type": "integer"},
        "horizon": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


def _schema_problems(doc):
    validator = jsonschema.Draft7Validator(CASE_SCHEMA)
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        out.append((path, err.message))
    return out


def validate_case(case):
    """Return a list of ``(path, message)`` invariant violations (empty if valid)."""
    probs = []
    buses = set(case.buses)
    nt = case.horizon
    if len(buses) != len(case.buses):
        probs.append(("buses", "duplicate bus ids"))
    if case.slack_bus not in buses:
        probs.append(("slack_bus", f"slack bus {case.slack_bus} is not a bus"))

    for kind, items in (("lines", case.lines), ("units", case.units),
                        ("loads", case.loads), ("wind", case.wind)):
        ids = [x.id for x in items]
        if len(set(ids)) != len(ids):
            probs.append((kind, "duplicate ids"))

    for k, ln in enumerate(case.lines):
        p = f"lines/{k} ({ln.id})"
        if ln.from_bus not in buses or ln.to_bus not in buses:
            probs.append((p, "references an unknown bus"))
        if ln.from_bus == ln.to_bus:
            probs.append((p, "from_bus equals to_bus"))
        if not ln.reactance > 0:
            probs.append((p + "/reactance", "must be > 0"))
        if not ln.flow_limit > 0:
            probs.append((p + "/flow_limit", "must be > 0"))

    for k, u in enumerate(case.units):
        p = f"units/{k} ({u.id})"
        if u.bus not in buses:
            probs.append((p + "/bus", f"unknown bus {u.bus}"))
        if not 0 <= u.p_min <= u.p_max:
            probs.append((p, f"requires 0 <= p_min <= p_max (got p_min={u.p_min}, p_max={u.p_max})"))
        if not (u.ramp_up > 0 and u.ramp_down > 0):
            probs.append((p, "ramp_up and ramp_down must be > 0"))
        if u.min_on < 1 or u.min_off < 1:
            probs.append((p, "min_on and min_off must be >= 1"))
        if u.initial_status == 0:
            probs.append((p + "/initial_status", "must be nonzero (+hours on / -hours off)"))
        elif u.initial_status > 0 and not u.p_min <= u.initial_output <= u.p_max:
            probs.append((p + "/initial_output", "an initially-on unit must start within [p_min, p_max]"))
        elif u.initial_status < 0 and u.initial_output != 0:
            probs.append((p + "/initial_output", "an initially-off unit must start at 0 MW"))
        bps = [b for b, _ in u.cost_segments]
        mcs = [c for _, c in u.cost_segments]
        if any(b2 <= b1 for b1, b2 in zip([0.0] + bps[:-1], bps)):
            probs.append((p + "/cost_segments", "breakpoints must be positive and strictly increasing"))
        if any(c2 < c1 for c1, c2 in zip(mcs[:-1], mcs[1:])):
            probs.append((p + "/cost_segments", "marginal costs must be non-decreasing (convex cost)"))
        if bps and abs(bps[-1] - u.p_max) > 1e-9:
            probs.append((p + "/cost_segments", "last breakpoint must equal p_max"))
        if u.no_load_cost < 0 or u.startup_cost < 0 or u.shutdown_cost < 0:
            probs.append((p, "fixed costs must be >= 0"))
        if not 0 <= u.corrective_up <= u.ramp_up:
            probs.append((p + "/corrective_up", "must lie in [0, ramp_up]"))
        if not 0 <= u.corrective_dn <= u.ramp_down:
            probs.append((p + "/corrective_dn", "must lie in [0, ramp_down]"))

    for kind, items in (("loads", case.loads), ("wind", case.wind)):
        for k, prof in enumerate(items):
            p = f"{kind}/{k} ({prof.id})"
            if prof.bus not in buses:
                probs.append((p + "/bus", f"unknown bus {prof.bus}"))
            if prof.hourly_mean.shape != (nt,):
                probs.append((p + "/hourly_mean", f"needs {nt} values, got {prof.hourly_mean.size}"))
            elif np.any(prof.hourly_mean < 0) or not np.all(np.isfinite(prof.hourly_mean)):
                probs.append((p + "/hourly_mean", "values must be finite and >= 0"))
            if not 0 <= prof.sigma_fraction < 1:
                probs.append((p + "/sigma_fraction", "must lie in [0, 1)"))
            if prof.distribution not in DISTRIBUTIONS:
                probs.append((p + "/distribution", f"must be one of {DISTRIBUTIONS}"))

    for attr in ("spinning_reserve", "operating_reserve"):
        arr = getattr(case, attr)
        if arr.shape != (nt,):
            probs.append((f"reserves/{attr.split('_')[0]}", f"needs {nt} values"))
        elif np.any(arr < 0):
            probs.append((f"reserves/{attr.split('_')[0]}", "must be >= 0"))

    if probs:
        return probs

    comps = _components(list(case.buses), case.lines)
    if len(comps) > 1:
        probs.append(("lines", f"network is disconnected into components {comps}"))
    cap = sum(u.p_max for u in case.units)
    peak = float(np.max(case.net_load()))
    if cap < peak:
        probs.append(("units", f"total capacity {cap} MW is below peak net load {peak:.3f} MW"))
    return probs


# --------------------------------------------------------------------------
# serialisation

def case_to_dict(case):
    def prof(x):
        return {"id": x.id, "bus": x.bus, "hourly_mean": [float(v) for v in x.hourly_mean],
                "sigma_fraction": x.sigma_fraction, "distribution": x.distribution,
                "skewness": x.skewness}

    return {
        "name": case.name,
        "buses": list(case.buses),
        "lines": [{"id": ln.id, "from_bus": ln.from_bus, "to_bus": ln.to_bus,
                   "reactance": ln.reactance, "flow_limit": ln.flow_limit} for ln in case.lines],
        "units": [{
            "id": u.id, "bus": u.bus, "p_min": u.p_min, "p_max": u.p_max,
            "ramp_up": u.ramp_up, "ramp_down": u.ramp_down,
            "min_on": u.min_on, "min_off": u.min_off,
            "initial_status": u.initial_status, "initial_output": u.initial_output,
            "cost_segments": [list(s) for s in u.cost_segments],
            "no_load_cost": u.no_load_cost, "startup_cost": u.startup_cost,
            "shutdown_cost": u.shutdown_cost,
            "corrective_up": u.corrective_up, "corrective_dn": u.corrective_dn,
        } for u in case.units],
        "loads": [prof(x) for x in case.loads],
        "wind": [prof(x) for x in case.wind],
        "reserves": {"spinning": [float(v) for v in case.spinning_reserve],
                     "operating": [float(v) for v in case.operating_reserve]},
        "slack_bus": case.slack_bus,
        "horizon": case.horizon,
    }


def case_from_dict(doc, validate=True):
    probs = _schema_problems(doc)
    if probs:
        raise CaseError(probs)

    def prof(x, default_sigma, default_dist):
        return UncertainProfile(
            id=x["id"], bus=x["bus"], hourly_mean=x["hourly_mean"],
            sigma_fraction=float(x.get("sigma_fraction", default_sigma)),
            distribution=x.get("distribution", default_dist),
            skewness=float(x.get("skewness", 0.0)))

    units = []
    for u in doc["units"]:
        kw = dict(u)
        kw["cost_segments"] = tuple(tuple(s) for s in u["cost_segments"])
        for key in ("p_min", "p_max", "ramp_up", "ramp_down", "initial_output"):
            kw[key] = float(kw[key])
        units.append(ThermalUnit(**kw))

    case = SystemCase(
        buses=tuple(doc["buses"]),
        lines=tuple(Line(ln["id"], ln["from_bus"], ln["to_bus"], float(ln["reactance"]),
                         float(ln["flow_limit"])) for ln in doc["lines"]),
        units=tuple(units),
        loads=tuple(prof(x, 0.10, "truncated-normal") for x in doc["loads"]),
        wind=tuple(prof(x, 0.20, "normal") for x in doc["wind"]),
        spinning_reserve=doc["reserves"]["spinning"],
        operating_reserve=doc["reserves"]["operating"],
        slack_bus=doc["slack_bus"],
        horizon=doc["horizon"],
        name=doc.get("name", "case"),
    )
    if validate:
        probs = validate_case(case)
        if probs:
            raise CaseError(probs)
    return case


def load_case(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CaseError([("<file>", f"not valid JSON: {exc}")]) from exc
    return case_from_dict(doc)


def save_case(case, path):
    Path(path).write_text(json.dumps(case_to_dict(case), indent=1) + "\n")
