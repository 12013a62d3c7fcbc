"""Bundled test systems.

``six_bus``    three thermal units, one wind farm, three load points, four
               lines plus two transformer branches (modelled as lines).
``tiny2``      two buses, two units, four hours.
``triangle3``  three buses in a triangle with equal reactances, four hours.

The numbers are synthetic; they only mimic the scale of the classic
six-bus study system.
"""

from __future__ import annotations

import numpy as np

from .model import Line, SystemCase, ThermalUnit, UncertainProfile

_LOAD_PROFILE = np.array([
    175.19, 165.15, 158.67, 154.73, 155.06, 160.48, 173.39, 177.60,
    186.81, 206.96, 228.61, 236.10, 242.18, 243.60, 248.86, 255.79,
    256.00, 246.74, 245.97, 237.35, 237.31, 232.67, 195.93, 195.60,
])

_WIND_PROFILE = np.array([
    44.0, 70.2, 76.0, 82.0, 84.0, 84.0, 100.0, 100.0,
    78.0, 64.0, 100.0, 92.0, 84.0, 80.0, 78.0, 32.0,
    4.0, 8.0, 10.0, 5.0, 6.0, 56.0, 82.0, 52.0,
]) * 0.5


def six_bus():
    units = (
        ThermalUnit("G1", 1, p_min=50.0, p_max=220.0, ramp_up=240.0, ramp_down=240.0,
                    min_on=4, min_off=4, initial_status=4, initial_output=120.0,
                    cost_segments=((140.0, 13.5), (180.0, 14.5), (220.0, 15.5)),
                    no_load_cost=177.0, startup_cost=100.0, shutdown_cost=0.0),
        ThermalUnit("G2", 2, p_min=10.0, p_max=100.0, ramp_up=180.0, ramp_down=180.0,
                    min_on=3, min_off=2, initial_status=-3, initial_output=0.0,
                    cost_segments=((40.0, 32.0), (70.0, 33.0), (100.0, 34.0)),
                    no_load_cost=130.0, startup_cost=200.0, shutdown_cost=0.0),
        ThermalUnit("G3", 6, p_min=10.0, p_max=50.0, ramp_up=90.0, ramp_down=90.0,
                    min_on=1, min_off=1, initial_status=-1, initial_output=0.0,
                    cost_segments=((20.0, 17.7), (35.0, 18.7), (50.0, 19.7)),
                    no_load_cost=137.0, startup_cost=50.0, shutdown_cost=0.0),
    )
    lines = (
        Line("L1", 1, 2, 0.170, 200.0),
        Line("L2", 1, 4, 0.258, 100.0),
        Line("L3", 2, 4, 0.197, 100.0),
        Line("L4", 5, 6, 0.140, 100.0),
        Line("T1", 2, 3, 0.037, 100.0),
        Line("T2", 4, 5, 0.037, 100.0),
    )
    loads = (
        UncertainProfile("D3", 3, 0.2 * _LOAD_PROFILE, 0.10, "truncated-normal"),
        UncertainProfile("D4", 4, 0.4 * _LOAD_PROFILE, 0.10, "truncated-normal"),
        UncertainProfile("D5", 5, 0.4 * _LOAD_PROFILE, 0.10, "truncated-normal"),
    )
    wind = (UncertainProfile("W1", 5, _WIND_PROFILE, 0.20, "normal"),)
    return SystemCase(
        buses=(1, 2, 3, 4, 5, 6), lines=lines, units=units, loads=loads, wind=wind,
        spinning_reserve=0.05 * _LOAD_PROFILE, operating_reserve=0.10 * _LOAD_PROFILE,
        slack_bus=1, horizon=24, name="six_bus")


def tiny2():
    units = (
        ThermalUnit("G1", 1, p_min=10.0, p_max=100.0, ramp_up=150.0, ramp_down=150.0,
                    min_on=1, min_off=1, initial_status=1, initial_output=40.0,
                    cost_segments=((60.0, 10.0), (100.0, 12.0)), no_load_cost=50.0,
                    startup_cost=20.0),
        ThermalUnit("G2", 2, p_min=5.0, p_max=60.0, ramp_up=150.0, ramp_down=150.0,
                    min_on=2, min_off=1, initial_status=-1, initial_output=0.0,
                    cost_segments=((30.0, 20.0), (60.0, 25.0)), no_load_cost=30.0,
                    startup_cost=40.0),
    )
    return SystemCase(
        buses=(1, 2), lines=(Line("L1", 1, 2, 0.1, 70.0),), units=units,
        loads=(UncertainProfile("D2", 2, [50.0, 70.0, 85.0, 60.0], 0.10, "truncated-normal"),),
        wind=(UncertainProfile("W1", 1, [10.0, 5.0, 8.0, 12.0], 0.20, "normal"),),
        spinning_reserve=[0.0] * 4, operating_reserve=[0.0] * 4,
        slack_bus=1, horizon=4, name="tiny2")


def triangle3():
    units = (
        ThermalUnit("G1", 1, p_min=0.0, p_max=150.0, ramp_up=80.0, ramp_down=80.0,
                    min_on=1, min_off=1, initial_status=2, initial_output=60.0,
                    cost_segments=((150.0, 10.0),), no_load_cost=20.0),
        ThermalUnit("G2", 2, p_min=5.0, p_max=80.0, ramp_up=80.0, ramp_down=80.0,
                    min_on=1, min_off=1, initial_status=-1, initial_output=0.0,
                    cost_segments=((80.0, 25.0),), no_load_cost=15.0, startup_cost=10.0),
    )
    lines = (
        Line("L12", 1, 2, 0.1, 100.0),
        Line("L13", 1, 3, 0.1, 50.0),
        Line("L23", 2, 3, 0.1, 100.0),
    )
    return SystemCase(
        buses=(1, 2, 3), lines=lines, units=units,
        loads=(UncertainProfile("D3", 3, [60.0, 90.0, 110.0, 70.0], 0.10, "truncated-normal"),),
        wind=(),
        spinning_reserve=[0.0] * 4, operating_reserve=[0.0] * 4,
        slack_bus=1, horizon=4, name="triangle3")


BUNDLED = {"six_bus": six_bus, "tiny2": tiny2, "triangle3": triangle3}
