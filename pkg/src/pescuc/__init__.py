"""Stochastic security-constrained unit commitment.

Benders decomposition of a day-ahead unit-commitment MILP into hourly
network and scenario feasibility checks, with three ways of representing
load and wind uncertainty: forecast values only, reduced Monte-Carlo
scenarios, and a two-point estimate scheme.
"""

from .driver import (Settings, SolveReport, solve_deterministic, solve_scenarios,
                     solve_stochastic_mcs, solve_stochastic_tpe)
from .evaluation import evaluate
from .model import SystemCase, compute_shift_factors, load_case, save_case

__all__ = ["Settings", "SolveReport", "SystemCase", "compute_shift_factors", "evaluate",
           "load_case", "save_case", "solve_deterministic", "solve_scenarios",
           "solve_stochastic_mcs", "solve_stochastic_tpe"]
