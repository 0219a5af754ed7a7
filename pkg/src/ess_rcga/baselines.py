"""Reference strategies: no battery, and the price-blind net-power heuristic."""

from __future__ import annotations

import numpy as np

from .cost import evaluate, no_ess_cost
from .domain import CostBreakdown, Scenario, Schedule
from .feasibility import terminal_floors

__all__ = ["npb_schedule", "npb_cost", "no_ess_cost"]


def npb_schedule(s: Scenario) -> Schedule:
    """Charge on generation surplus, discharge on deficit, ignoring prices.

    Charging is capped by the charge limit and remaining headroom, discharging
    by the discharge limit and the energy stored. Cyclic scenarios also never
    drop below the level from which the starting charge can be regained.
    """
    b = s.battery
    floors = terminal_floors(s)
    surplus = s.generation - s.load
    x = np.empty(s.horizon)
    prev = s.initial_charge
    for i, d in enumerate(surplus):
        if d > 0:
            cur = prev + min(b.charge_limit, d, b.capacity - prev)
        elif d < 0:
            cur = prev - min(b.discharge_limit, -d, prev)
        else:
            cur = prev
        cur = max(cur, floors[i])
        x[i] = cur
        prev = cur
    return Schedule(x)


def npb_cost(s: Scenario, literal_demand_formula: bool = False) -> CostBreakdown:
    return evaluate(s, npb_schedule(s), literal_demand_formula)
