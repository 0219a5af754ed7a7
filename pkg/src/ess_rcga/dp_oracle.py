"""Exact solver on a discretized battery-state grid, used to certify GA results.

The demand charge depends on the day's maximum net draw, which couples all
hours. Fixing a cap ``P`` on the net draw makes the remaining energy charge
separable by hour, so the solver runs a stage-wise DP per candidate cap and
takes the best ``energy(P) + rate * P``. Candidate caps are every net value a
grid transition can produce, so the cap of the true grid optimum is always
among them.

``brute_force_solve`` enumerates every grid schedule and exists to check the
DP on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import evaluate, total_costs
from .domain import FEASIBILITY_TOL, CostBreakdown, Scenario, Schedule
from .feasibility import terminal_floors

SNAP_MODES = ("floor", "nearest")
MAX_ENUMERATION = 10**7
_CAP_BLOCK = 128


class EnumerationTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class DpConfig:
    grid_step: float = 0.05
    snap_mode: str = "floor"

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid_step must be > 0")
        if self.snap_mode not in SNAP_MODES:
            raise ValueError(f"snap_mode must be one of {SNAP_MODES}")


@dataclass(frozen=True)
class DpResult:
    schedule: Schedule
    cost: CostBreakdown
    scenario: Scenario  # the instance actually solved (x0 possibly snapped)
    snap_distance: float  # original x0 minus the grid state used
    grid: np.ndarray


def grid_states(capacity: float, step: float) -> np.ndarray:
    """``0, step, 2*step, ...`` up to ``capacity``; the top state is always ``capacity``."""
    k = int(np.floor(capacity / step + 1e-9))
    states = np.arange(k + 1) * step
    if capacity - states[-1] > 1e-9:
        states = np.append(states, capacity)
    else:
        states[-1] = capacity
    return states


def _snap_x0(s: Scenario, states: np.ndarray, mode: str) -> tuple[Scenario, float]:
    x0 = s.initial_charge
    if mode == "floor":
        idx = int(np.searchsorted(states, x0 + 1e-9, side="right")) - 1
    else:
        idx = int(np.argmin(np.abs(states - x0)))
    snapped = float(states[max(idx, 0)])
    if snapped == x0:
        return s, 0.0
    return s.replace(initial_charge=snapped), x0 - snapped


class _Stages:
    """Per-hour transition nets and energy costs on the grid."""

    def __init__(self, s: Scenario, states: np.ndarray, literal: bool):
        b = s.battery
        self.s = s
        self.literal = literal
        self.states = states
        self.start = int(np.flatnonzero(states == s.initial_charge)[0])
        delta = states[None, :] - states[:, None]  # [from, to]
        step_ok = (delta <= b.charge_limit + FEASIBILITY_TOL) & (
            delta >= -b.discharge_limit - FEASIBILITY_TOL)
        floors = terminal_floors(s)
        T = s.horizon
        S = states.size
        self.net = np.empty((T, S, S))
        self.cost = np.empty((T, S, S))
        for i in range(T):
            ok = step_ok & (states >= floors[i] - FEASIBILITY_TOL)[None, :]
            net = delta + s.load[i] - s.generation[i]
            self.net[i] = np.where(ok, net, np.nan)
            self.cost[i] = np.where(ok, np.where(net > 0, net * s.tariff.energy_price[i], 0.0),
                                    np.inf)

    def cap_candidates(self) -> np.ndarray:
        vals = self.net[~np.isnan(self.net)]
        no_ess_peak = np.max(self.s.load - self.s.generation)
        return np.unique(np.append(vals, no_ess_peak))

    def min_energy(self, caps: np.ndarray) -> np.ndarray:
        """Minimal energy charge per cap (inf where no schedule respects the cap)."""
        S = self.states.size
        V = np.full((caps.size, S), np.inf)
        V[:, self.start] = 0.0
        for i in range(self.s.horizon):
            over = self.net[i][None, :, :] > caps[:, None, None]
            M = V[:, :, None] + np.where(over, np.inf, self.cost[i][None, :, :])
            V = M.min(axis=1)
        return V.min(axis=1)

    def path_for_cap(self, cap: float) -> np.ndarray:
        S = self.states.size
        T = self.s.horizon
        V = np.full(S, np.inf)
        V[self.start] = 0.0
        choice = np.empty((T, S), dtype=np.intp)
        for i in range(T):
            stage = np.where(self.net[i] > cap, np.inf, self.cost[i])
            M = V[:, None] + stage
            choice[i] = np.argmin(M, axis=0)
            V = M[choice[i], np.arange(S)]
        idx = np.empty(T, dtype=np.intp)
        idx[-1] = int(np.argmin(V))
        for i in range(T - 1, 0, -1):
            idx[i - 1] = choice[i, idx[i]]
        return self.states[idx]


def dp_solve(s: Scenario, cfg: DpConfig = DpConfig(),
             literal_demand_formula: bool = False) -> DpResult:
    """Cheapest grid schedule for ``s`` (exact over the grid).

    ``x0`` is snapped onto the grid according to ``cfg.snap_mode`` when it is
    not already a grid state; the distance is reported in the result.
    """
    states = grid_states(s.battery.capacity, cfg.grid_step)
    solved, snap = _snap_x0(s, states, cfg.snap_mode)
    stages = _Stages(solved, states, literal_demand_formula)

    caps = stages.cap_candidates()
    energy = np.concatenate([stages.min_energy(caps[k:k + _CAP_BLOCK])
                             for k in range(0, caps.size, _CAP_BLOCK)])
    billed = caps if literal_demand_formula else np.maximum(caps, 0.0)
    bound = energy + solved.tariff.demand_rate * billed
    best = int(np.argmin(bound))

    residual = stages.path_for_cap(float(caps[best]))
    return DpResult(
        schedule=Schedule(residual),
        cost=evaluate(solved, residual, literal_demand_formula),
        scenario=solved,
        snap_distance=snap,
        grid=states,
    )


def brute_force_solve(s: Scenario, cfg: DpConfig = DpConfig(),
                      literal_demand_formula: bool = False,
                      chunk: int = 200_000) -> DpResult:
    """Enumerate every grid schedule and return the cheapest feasible one.

    Raises:
        EnumerationTooLargeError: if there are more than ``10**7`` grid schedules.
    """
    states = grid_states(s.battery.capacity, cfg.grid_step)
    solved, snap = _snap_x0(s, states, cfg.snap_mode)
    T = solved.horizon
    S = states.size
    total = S ** T
    if total > MAX_ENUMERATION:
        raise EnumerationTooLargeError(f"{S}^{T} = {total} schedules exceeds {MAX_ENUMERATION}")

    b = solved.battery
    floors = terminal_floors(solved)
    best_cost = np.inf
    best_x = None
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        X = states[np.stack(np.unravel_index(flat, (S,) * T), axis=1)]
        prev = np.concatenate((np.full((X.shape[0], 1), solved.initial_charge), X[:, :-1]), axis=1)
        delta = X - prev
        ok = np.all((delta <= b.charge_limit + FEASIBILITY_TOL)
                    & (delta >= -b.discharge_limit - FEASIBILITY_TOL)
                    & (X >= floors - FEASIBILITY_TOL), axis=1)
        if not ok.any():
            continue
        costs = np.where(ok, total_costs(solved, X, literal_demand_formula), np.inf)
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost = costs[k]
            best_x = X[k]

    return DpResult(
        schedule=Schedule(best_x),
        cost=evaluate(solved, best_x, literal_demand_formula),
        scenario=solved,
        snap_distance=snap,
        grid=states,
    )
