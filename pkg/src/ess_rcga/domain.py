"""Scenario and solution data types shared by the rest of the package.

Units: energy in kWh, power in kW, prices in cents/kWh, demand rate in
cents/kW, money in cents. Intervals are one hour long, so a power limit in kW
is numerically the same as an energy step in kWh.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

FEASIBILITY_TOL = 1e-12


class ScenarioValidationError(ValueError):
    """Raised when a scenario breaks one or more invariants.

    All violations found are collected in ``violations``.
    """

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid scenario: {lines}")


class InfeasibleScheduleError(ValueError):
    """A schedule breaks the capacity or power constraints."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"infeasible schedule at hour index {index}: {reason}")


def _frozen_array(values: ArrayLike) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BatterySpec:
    """Usable capacity (kWh) and per-hour charge/discharge limits (kW)."""

    capacity: float
    charge_limit: float
    discharge_limit: float
    nominal_capacity: Optional[float] = None  # informational only

    def __post_init__(self):
        object.__setattr__(self, "capacity", float(self.capacity))
        object.__setattr__(self, "charge_limit", float(self.charge_limit))
        object.__setattr__(self, "discharge_limit", float(self.discharge_limit))
        if self.nominal_capacity is not None:
            object.__setattr__(self, "nominal_capacity", float(self.nominal_capacity))


@dataclass(frozen=True, eq=False)
class Tariff:
    """Hourly energy prices (cents/kWh) plus a demand-charge rate (cents/kW)."""

    energy_price: np.ndarray
    demand_rate: float

    def __post_init__(self):
        object.__setattr__(self, "energy_price", _frozen_array(self.energy_price))
        object.__setattr__(self, "demand_rate", float(self.demand_rate))

    def __eq__(self, other):
        if not isinstance(other, Tariff):
            return NotImplemented
        return (
            np.array_equal(self.energy_price, other.energy_price)
            and self.demand_rate == other.demand_rate
        )

    def replace(self, **changes) -> "Tariff":
        kwargs = {"energy_price": self.energy_price, "demand_rate": self.demand_rate}
        kwargs.update(changes)
        return Tariff(**kwargs)


@dataclass(frozen=True)
class ScenarioMeta:
    """Descriptive labels carried through serialization; no effect on cost."""

    season: Optional[str] = None
    weather: Optional[str] = None
    day_type: Optional[str] = None
    synthetic: bool = False


@dataclass(frozen=True, eq=False)
class Scenario:
    """One day of inputs for the scheduling problem.

    ``horizon`` defaults to ``len(load)``. Construction never validates; call
    :func:`validate_scenario` (parsers and the CLI do).

    When ``cyclic`` is set the battery must end the day holding at least
    ``initial_charge``.
    """

    load: np.ndarray
    generation: np.ndarray
    tariff: Tariff
    battery: BatterySpec
    initial_charge: float = 0.0
    horizon: Optional[int] = None
    cyclic: bool = False
    name: str = ""
    meta: ScenarioMeta = field(default_factory=ScenarioMeta)

    def __post_init__(self):
        object.__setattr__(self, "load", _frozen_array(self.load))
        object.__setattr__(self, "generation", _frozen_array(self.generation))
        object.__setattr__(self, "initial_charge", float(self.initial_charge))
        if self.horizon is None:
            object.__setattr__(self, "horizon", int(self.load.size))
        else:
            object.__setattr__(self, "horizon", int(self.horizon))

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            np.array_equal(self.load, other.load)
            and np.array_equal(self.generation, other.generation)
            and self.tariff == other.tariff
            and self.battery == other.battery
            and self.initial_charge == other.initial_charge
            and self.horizon == other.horizon
            and self.cyclic == other.cyclic
            and self.name == other.name
            and self.meta == other.meta
        )

    def replace(self, **changes) -> "Scenario":
        kwargs = {
            "load": self.load,
            "generation": self.generation,
            "tariff": self.tariff,
            "battery": self.battery,
            "initial_charge": self.initial_charge,
            "horizon": self.horizon,
            "cyclic": self.cyclic,
            "name": self.name,
            "meta": self.meta,
        }
        if "load" in changes and "horizon" not in changes:
            kwargs["horizon"] = None
        kwargs.update(changes)
        return Scenario(**kwargs)


@dataclass(frozen=True, eq=False)
class Schedule:
    """Residual battery energy at the end of each hour, ``x_1 .. x_T``."""

    residual: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "residual", _frozen_array(self.residual))

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return np.array_equal(self.residual, other.residual)

    def __len__(self):
        return self.residual.size


ScheduleLike = Union[Schedule, ArrayLike]


def as_residual(x: ScheduleLike) -> np.ndarray:
    if isinstance(x, Schedule):
        return x.residual
    return np.asarray(x, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class CostBreakdown:
    energy_charge: float
    demand_charge: float
    total: float
    peak_net: float
    net_series: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "net_series", _frozen_array(self.net_series))


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message} [{self.code}]"


def scenario_violations(s: Scenario) -> list[Violation]:
    """Collect every invariant violation of ``s`` (empty list if valid)."""
    out: list[Violation] = []
    T = s.horizon
    if T < 1:
        out.append(Violation("empty_horizon", "horizon", f"horizon must be >= 1, got {T}"))

    for name, arr in (("load", s.load), ("generation", s.generation),
                      ("tariff.energy_price", s.tariff.energy_price)):
        if arr.size != T:
            out.append(Violation(
                "length_mismatch", name, f"expected {T} entries, got {arr.size}"))
        if not np.all(np.isfinite(arr)):
            out.append(Violation("non_finite", name, "contains NaN or infinity"))
        bad = np.flatnonzero(arr < 0)
        if bad.size:
            out.append(Violation(
                "negative_entry", name, f"negative value at index {int(bad[0])}"))

    for name, val in (("tariff.demand_rate", s.tariff.demand_rate),
                      ("battery.capacity", s.battery.capacity),
                      ("battery.charge_limit", s.battery.charge_limit),
                      ("battery.discharge_limit", s.battery.discharge_limit)):
        if not np.isfinite(val):
            out.append(Violation("non_finite", name, "must be finite"))
        elif val < 0:
            out.append(Violation("negative_entry", name, f"must be >= 0, got {val}"))

    x0 = s.initial_charge
    if not (0.0 <= x0 <= s.battery.capacity):
        out.append(Violation(
            "x0_out_of_range", "initial_charge",
            f"{x0} outside [0, {s.battery.capacity}]"))
    return out


def validate_scenario(s: Scenario) -> Scenario:
    """Return ``s`` unchanged if valid, else raise with every violation found."""
    violations = scenario_violations(s)
    if violations:
        raise ScenarioValidationError(violations)
    return s
