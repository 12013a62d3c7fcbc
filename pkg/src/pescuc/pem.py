"""Hong's two-point estimate scheme (2m evaluations for m random inputs).

Each input is replaced by two concentrations placed so that, for a single
input, the first three central moments are matched exactly.  An output
evaluated at the 2m points (one input displaced, all others at their mean)
yields its raw moments by a weighted sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomInput:
    index: int
    mean: float
    std: float
    skewness: float = 0.0


@dataclass(frozen=True)
class Concentration:
    index: int          # position of the displaced input
    side: int           # 1 or 2
    xi: float           # standard location
    location: float
    weight: float
    point: tuple        # full evaluation point, all other inputs at their mean


@dataclass(frozen=True)
class MomentEstimate:
    raw: np.ndarray     # raw[j-1] = E[Z**j]

    @property
    def mean(self):
        return self.raw[0]

    @property
    def std(self):
        return np.sqrt(np.maximum(0.0, self.raw[1] - self.raw[0] ** 2))


def standard_locations(skewness, m):
    if m < 1:
        raise ValueError(f"need at least one random input, got m={m}")
    half = skewness / 2.0
    root = math.sqrt(m + half * half)
    return half + root, half - root


def weights(xi1, xi2, m):
    if xi1 == xi2:
        raise ValueError("degenerate concentrations: xi1 == xi2")
    if m < 1:
        raise ValueError(f"need at least one random input, got m={m}")
    span = xi1 - xi2
    return -xi2 / (m * span), xi1 / (m * span)


def build_concentrations(inputs):
    """Concentrations for all inputs with positive spread.

    Inputs with ``std == 0`` do not count towards m and stay pinned at their
    mean in every evaluation point.  Returns an empty list when no input is
    random.
    """
    inputs = list(inputs)
    if not inputs:
        raise ValueError("empty input list")
    means = tuple(float(x.mean) for x in inputs)
    active = [k for k, x in enumerate(inputs) if x.std > 0]
    m = len(active)
    out = []
    for k in active:
        x = inputs[k]
        xi = standard_locations(x.skewness, m)
        w = weights(xi[0], xi[1], m)
        for side in (1, 2):
            loc = x.mean + xi[side - 1] * x.std
            point = means[:k] + (loc,) + means[k + 1:]
            out.append(Concentration(x.index, side, xi[side - 1], loc, w[side - 1], point))
    return out


def estimate_moments(evaluations, j_max=2):
    """Raw moments of the output from ``(weight, Z)`` pairs.

    ``Z`` may be a scalar or an array; moments are taken componentwise.
    """
    evaluations = list(evaluations)
    total = math.fsum(w for w, _ in evaluations)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"concentration weights sum to {total!r}, expected 1")
    zs = [np.asarray(z, dtype=float) for _, z in evaluations]
    raw = np.array([
        sum(w * z ** j for (w, _), z in zip(evaluations, zs)) for j in range(1, j_max + 1)
    ])
    return MomentEstimate(raw)
