"""Seeded sampling of load / wind deviates and fast-forward scenario reduction.

Every random variable is a multiplicative deviate with mean 1 applied to a
whole 24-hour profile.  Loads follow a normal truncated at
``[max(0, 1 - 3 s), 1 + 3 s]`` whose underlying scale is stretched so that
the *truncated* standard deviation equals the requested fraction ``s``.
Wind follows a plain normal clipped at zero.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import optimize, stats
from scipy.spatial.distance import cdist

from .pem import RandomInput


@dataclass(frozen=True)
class ScenarioSet:
    deviates: np.ndarray        # (n_scenarios, n_variables)
    probabilities: np.ndarray
    names: tuple
    seed: int | None = None
    provenance: str = "raw"

    def __post_init__(self):
        d = np.array(self.deviates, dtype=float, ndmin=2)
        p = np.array(self.probabilities, dtype=float)
        if p.shape != (d.shape[0],):
            raise ValueError("one probability per scenario required")
        if np.any(p <= 0) or abs(math.fsum(p) - 1.0) > 1e-9:
            raise ValueError("probabilities must be positive and sum to 1")
        d.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "deviates", d)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self):
        return self.deviates.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx)
        p = self.probabilities[idx]
        return ScenarioSet(self.deviates[idx], p / math.fsum(p), self.names, self.seed,
                           self.provenance)


@lru_cache(maxsize=64)
def truncated_scale(sigma):
    """Underlying normal scale giving post-truncation std ``sigma``.

    Bounds are fixed at ``[max(0, 1 - 3 sigma), 1 + 3 sigma]`` around a mean
    of 1.
    """
    if sigma <= 0:
        return 0.0
    lo, hi = max(0.0, 1.0 - 3.0 * sigma), 1.0 + 3.0 * sigma

    def gap(scale):
        a, b = (lo - 1.0) / scale, (hi - 1.0) / scale
        return stats.truncnorm.std(a, b, loc=1.0, scale=scale) - sigma

    return optimize.brentq(gap, sigma * 0.5, sigma * 20.0, xtol=1e-14, rtol=1e-14)


def deviate_distribution(profile):
    """Frozen scipy distribution of a profile's deviate (before wind clipping)."""
    s = profile.sigma_fraction
    if profile.distribution == "truncated-normal":
        scale = truncated_scale(s)
        lo, hi = max(0.0, 1.0 - 3.0 * s), 1.0 + 3.0 * s
        return stats.truncnorm((lo - 1.0) / scale, (hi - 1.0) / scale, loc=1.0, scale=scale)
    return stats.norm(loc=1.0, scale=s)


def random_inputs(case):
    """Point-estimate inputs for every load point and wind farm."""
    out = []
    for k, prof in enumerate(case.uncertain):
        if prof.sigma_fraction == 0:
            out.append(RandomInput(k, 1.0, 0.0, 0.0))
            continue
        dist = deviate_distribution(prof)
        if prof.distribution == "truncated-normal":
            mean, var, skew = (float(v) for v in dist.stats(moments="mvs"))
        else:
            mean, var, skew = 1.0, prof.sigma_fraction ** 2, prof.skewness
        out.append(RandomInput(k, mean, math.sqrt(var), skew))
    return out


def sample(case, n, seed):
    """``n`` equiprobable scenarios of deviates, reproducible from ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    cols = []
    for prof in case.uncertain:
        if prof.sigma_fraction == 0:
            cols.append(np.ones(n))
            continue
        x = deviate_distribution(prof).rvs(size=n, random_state=rng)
        if prof.distribution == "normal":
            x = np.maximum(x, 0.0)
        cols.append(np.asarray(x, dtype=float))
    dev = np.column_stack(cols) if cols else np.ones((n, 0))
    return ScenarioSet(dev, np.full(n, 1.0 / n), [p.id for p in case.uncertain], seed, "raw")


def _dist_block(x, y):
    return cdist(x, y)


def _gains(x, p, current, cand, block=512):
    """Probability-weighted distance reduction from adding each candidate."""
    out = np.empty(len(cand))
    for s in range(0, len(cand), block):
        c = cand[s:s + block]
        d = _dist_block(x[c], x)                    # (block, n)
        out[s:s + block] = (np.maximum(current[None, :] - d, 0.0) * p[None, :]).sum(1)
    return out


TIE_TOL = 1e-10


def _tie_tol(level):
    """Gains closer than this count as tied; ties go to the lowest index."""
    return TIE_TOL * max(1.0, abs(level))


def reduce(scen, target):
    """Fast-forward selection down to ``target`` scenarios.

    Greedily adds the scenario that most reduces the probability-weighted
    Euclidean distance of all scenarios to the selected set, then moves the
    probability of each dropped scenario onto its nearest kept scenario.
    Selection is exact greedy; candidate gains are re-evaluated lazily since
    they can only shrink as the selected set grows.  Gains within a relative
    ``TIE_TOL`` of the best are treated as ties and go to the lowest index.
    """
    n = len(scen)
    if target < 1:
        raise ValueError("target must be >= 1")
    if target > n:
        raise ValueError(f"target {target} exceeds set size {n}")
    if target == n:
        return ScenarioSet(scen.deviates, scen.probabilities, scen.names, scen.seed, "reduced")

    x = np.ascontiguousarray(scen.deviates)
    p = np.asarray(scen.probabilities)
    everything = np.arange(n)

    # first pick: minimal weighted distance to all others
    totals = np.empty(n)
    for s in range(0, n, 512):
        totals[s:s + 512] = _dist_block(x[s:s + 512], x) @ p
    first = int(np.flatnonzero(totals <= totals.min() + _tie_tol(totals.min()))[0])
    selected = [first]
    current = _dist_block(x[first:first + 1], x)[0]
    current[first] = 0.0

    def gain(j):
        return _gains(x, p, current, np.array([j]))[0]

    if target > 1:
        cand = np.delete(everything, first)
        g = _gains(x, p, current, cand)
        heap = [(-gv, int(j)) for gv, j in zip(g, cand)]
        heapq.heapify(heap)
        stamp = {int(j): 1 for j in cand}
        rnd = 1
        while len(selected) < target:
            # pop until a gain computed this round is on top; stale entries
            # are upper bounds, so nothing left can beat it
            while True:
                neg, j = heapq.heappop(heap)
                if stamp[j] == rnd:
                    break
                stamp[j] = rnd
                heapq.heappush(heap, (-gain(j), j))
            best = -neg
            floor = best - _tie_tol(float(p @ current))
            # collect every candidate within the tie tolerance
            tied = [(best, j)]
            while heap and -heap[0][0] >= floor:
                neg, k = heapq.heappop(heap)
                if stamp[k] != rnd:
                    stamp[k] = rnd
                    neg = -gain(k)
                    if -neg < floor:
                        heapq.heappush(heap, (neg, k))
                        continue
                tied.append((-neg, k))
            j = min(k for _, k in tied)
            for gv, k in tied:
                if k != j:
                    heapq.heappush(heap, (-gv, k))
            selected.append(j)
            del stamp[j]
            np.minimum(current, _dist_block(x[j:j + 1], x)[0], out=current)
            rnd += 1

    keep = np.array(sorted(selected))
    d_keep = np.vstack([_dist_block(x[s:s + 512], x[keep]) for s in range(0, n, 512)])
    nearest = np.argmin(d_keep, axis=1)
    nearest[keep] = np.arange(len(keep))
    probs = [[] for _ in keep]
    for i in range(n):
        probs[nearest[i]].append(p[i])
    newp = np.array([math.fsum(v) for v in probs])
    newp /= math.fsum(newp)
    return ScenarioSet(x[keep], newp, scen.names, scen.seed, "reduced")


def reduce_bruteforce(scen, target):
    """Plain O(n^2) fast-forward selection (reference implementation)."""
    x, p = scen.deviates, scen.probabilities
    n = len(scen)
    dist = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    selected = []
    current = np.full(n, np.inf)
    for _ in range(target):
        vals = np.array([np.inf if u in selected else float(p @ np.minimum(current, dist[u]))
                         for u in range(n)])
        level = float(p @ current) if np.isfinite(current).all() else vals.min()
        best = int(np.flatnonzero(vals <= vals.min() + _tie_tol(level))[0])
        selected.append(best)
        current = np.minimum(current, dist[best])
    keep = np.array(sorted(selected))
    nearest = keep[np.argmin(dist[:, keep], axis=1)]
    newp = np.array([p[nearest == k].sum() for k in keep])
    return ScenarioSet(x[keep], newp / newp.sum(), scen.names, scen.seed, "reduced")


def kantorovich_objective(raw, reduced):
    """Probability-weighted distance of raw scenarios to the reduced support."""
    d = np.vstack([_dist_block(raw.deviates[s:s + 512], reduced.deviates)
                   for s in range(0, len(raw), 512)])
    return float(raw.probabilities @ d.min(axis=1))


def write_scenarios(scen, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["probability", *scen.names])
        for prob, row in zip(scen.probabilities, scen.deviates):
            w.writerow([repr(float(prob))] + [repr(float(v)) for v in row])


def read_scenarios(path, seed=None):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names = rows[0][1:]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return ScenarioSet(data[:, 1:], data[:, 0], names, seed, Path(path).stem)
