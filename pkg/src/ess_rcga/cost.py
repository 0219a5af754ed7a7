"""Daily electricity bill: hourly TOU energy charge plus a demand charge.

Energy is billed only for hours with positive net grid draw (exports earn
nothing). The demand charge is the demand rate times the day's peak net draw.
By default the peak is floored at zero so a day of pure export does not earn a
demand credit; ``literal_demand_formula=True`` drops the floor.
"""

from __future__ import annotations

import numpy as np

from .domain import CostBreakdown, Scenario, ScheduleLike
from .feasibility import require_feasible


class UndefinedSavingError(ValueError):
    pass


def _net(s: Scenario, res: np.ndarray) -> np.ndarray:
    prev = np.concatenate(([s.initial_charge], res[:-1]))
    return res - prev + s.load - s.generation


def net_series(s: Scenario, x: ScheduleLike) -> np.ndarray:
    """Net energy drawn from the grid each hour, ``x_i - x_{i-1} + l_i - g_i``.

    Raises:
        InfeasibleScheduleError: if ``x`` breaks the battery constraints.
    """
    return _net(s, require_feasible(x, s))


def _breakdown(s: Scenario, net: np.ndarray, literal_demand_formula: bool) -> CostBreakdown:
    price = s.tariff.energy_price
    energy = float(np.sum(np.where(net > 0, net * price, 0.0)))
    peak = float(np.max(net))
    billed_peak = peak if literal_demand_formula else max(0.0, peak)
    demand = billed_peak * s.tariff.demand_rate
    return CostBreakdown(
        energy_charge=energy,
        demand_charge=demand,
        total=energy + demand,
        peak_net=peak,
        net_series=net,
    )


def evaluate(s: Scenario, x: ScheduleLike, literal_demand_formula: bool = False) -> CostBreakdown:
    """Bill for running schedule ``x`` on scenario ``s``.

    Raises:
        InfeasibleScheduleError: if ``x`` breaks the battery constraints.
    """
    return _breakdown(s, net_series(s, x), literal_demand_formula)


def no_ess_cost(s: Scenario, literal_demand_formula: bool = False) -> CostBreakdown:
    """Bill with no battery at all: the grid covers ``l_i - g_i`` every hour."""
    return _breakdown(s, s.load - s.generation, literal_demand_formula)


def total_costs(s: Scenario, X: np.ndarray, literal_demand_formula: bool = False) -> np.ndarray:
    """Vectorized bill totals for a batch of schedules (rows of ``X``).

    No feasibility check is made; callers pass schedules they already trust.
    """
    X = np.asarray(X, dtype=float)
    prev = np.concatenate((np.full((X.shape[0], 1), s.initial_charge), X[:, :-1]), axis=1)
    net = X - prev + s.load - s.generation
    energy = np.sum(np.where(net > 0, net * s.tariff.energy_price, 0.0), axis=1)
    peak = net.max(axis=1)
    if not literal_demand_formula:
        peak = np.maximum(peak, 0.0)
    return energy + peak * s.tariff.demand_rate


def saving_percent(reference: float, algo: float) -> float:
    """Percentage saving of ``algo`` against ``reference`` (usually the no-battery bill)."""
    if not reference > 0:
        raise UndefinedSavingError(f"saving undefined for reference cost {reference}")
    return 100.0 * (reference - algo) / reference
