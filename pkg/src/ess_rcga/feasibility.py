"""Per-hour feasible intervals for the battery state and nearest-endpoint repair.

Every hour the stored energy must stay within ``[0, C]`` and may move by at
most ``P_c`` up or ``P_d`` down, so given the previous state the next one lies
in ``[max(0, prev - P_d), min(C, prev + P_c)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import (
    FEASIBILITY_TOL,
    BatterySpec,
    InfeasibleScheduleError,
    Scenario,
    Schedule,
    ScheduleLike,
    as_residual,
)


@dataclass(frozen=True)
class GeneBounds:
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def gene_bounds(prev: float, battery: BatterySpec, floor: float = 0.0) -> GeneBounds:
    """Feasible interval for the next state given the previous one.

    ``floor`` raises the lower end above zero; it is used for cyclic scenarios
    where the battery has to be able to climb back to its starting level.
    """
    C = battery.capacity
    if not (-FEASIBILITY_TOL <= prev <= C + FEASIBILITY_TOL):
        raise ValueError(f"previous state {prev} outside [0, {C}]")
    lower = max(floor, prev - battery.discharge_limit)
    upper = min(C, prev + battery.charge_limit)
    return GeneBounds(lower, upper)


def clamp_to_bounds(value: float, bounds: GeneBounds) -> float:
    # nearest endpoint; when lower == upper both are the same point
    if value < bounds.lower:
        return bounds.lower
    if value > bounds.upper:
        return bounds.upper
    return value


def terminal_floors(s: Scenario) -> np.ndarray:
    """Lowest admissible state per hour so a cyclic day can end at ``x0``.

    All zeros unless ``s.cyclic`` is set.
    """
    T = s.horizon
    if not s.cyclic:
        return np.zeros(T)
    remaining = np.arange(T - 1, -1, -1, dtype=float)
    return np.maximum(0.0, s.initial_charge - remaining * s.battery.charge_limit)


def repair_suffix(x: ScheduleLike, from_index: int, s: Scenario) -> Schedule:
    """Clamp genes ``from_index .. T-1`` (0-based) into their intervals, left to right.

    Each gene's interval is taken from its already-repaired left neighbour, so
    a single pass restores feasibility for the whole suffix. Genes already
    inside their interval are left untouched.
    """
    res = np.array(as_residual(x), dtype=float)
    floors = terminal_floors(s)
    C = s.battery.capacity
    pc = s.battery.charge_limit
    pd = s.battery.discharge_limit
    prev = s.initial_charge if from_index == 0 else res[from_index - 1]
    for i in range(from_index, res.size):
        lo = max(floors[i], prev - pd)
        hi = min(C, prev + pc)
        v = res[i]
        if v < lo:
            v = lo
        elif v > hi:
            v = hi
        res[i] = v
        prev = v
    return Schedule(res)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of :func:`is_feasible`; truthy when the schedule is feasible."""

    feasible: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.feasible

    def raise_if_infeasible(self):
        if not self.feasible:
            raise InfeasibleScheduleError(self.index, self.reason)


def is_feasible(x: ScheduleLike, s: Scenario, tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    res = as_residual(x)
    T = s.horizon
    if res.size != T:
        return FeasibilityReport(False, min(res.size, T), f"length {res.size} != horizon {T}")
    b = s.battery
    prev = np.concatenate(([s.initial_charge], res[:-1]))
    delta = res - prev
    checks = (
        (res < -tol, "state below 0"),
        (res > b.capacity + tol, f"state above capacity {b.capacity}"),
        (delta > b.charge_limit + tol, f"charge step exceeds {b.charge_limit}"),
        (delta < -b.discharge_limit - tol, f"discharge step exceeds {b.discharge_limit}"),
        (~np.isfinite(res), "non-finite state"),
    )
    first: Optional[tuple[int, str]] = None
    for mask, reason in checks:
        hits = np.flatnonzero(mask)
        if hits.size and (first is None or hits[0] < first[0]):
            first = (int(hits[0]), reason)
    if first is None and s.cyclic and T > 0 and res[-1] < s.initial_charge - tol:
        first = (T - 1, "cyclic day ends below initial charge")
    if first is not None:
        return FeasibilityReport(False, first[0], first[1])
    return FeasibilityReport(True)


def require_feasible(x: ScheduleLike, s: Scenario) -> np.ndarray:
    res = as_residual(x)
    is_feasible(res, s).raise_if_infeasible()
    return res
