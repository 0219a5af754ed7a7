"""Real-coded genetic algorithm for battery schedules.

Each individual is the vector of end-of-hour battery states. Every operator
works left to right so that each gene stays inside the interval allowed by
its left neighbour, which means the population never contains an infeasible
schedule and no penalty terms are needed.

One generation: shuffle the population into N/2 disjoint pairs, make one
child per pair (constrained BLX-alpha, then Gaussian mutation), then keep the
best N of parents and children.

All randomness comes from one ``numpy.random.Generator`` backed by PCG64,
seeded from ``RcgaConfig.seed``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .domain import FEASIBILITY_TOL, Scenario, Schedule
from .feasibility import terminal_floors


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class RcgaConfig:
    """GA settings. ``mutation_rate_pm=None`` means ``0.1 / T``."""

    population_n: int = 100
    generations: int = 2000
    alpha: float = 0.5
    mutation_rate_pm: Optional[float] = None
    seed: int = 0
    parallel_fitness: bool = False
    workers: int = 4
    literal_demand_formula: bool = False

    def __post_init__(self):
        if self.population_n < 2 or self.population_n % 2:
            raise ValueError(f"population_n must be even and >= 2, got {self.population_n}")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        if self.mutation_rate_pm is not None and not 0 <= self.mutation_rate_pm <= 1:
            raise ValueError("mutation_rate_pm must lie in [0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def pm_for(self, horizon: int) -> float:
        if self.mutation_rate_pm is None:
            return 0.1 / horizon
        return self.mutation_rate_pm


@dataclass(frozen=True)
class Individual:
    genes: Schedule
    fitness: float


@dataclass
class Population:
    """Genes as an ``(N, T)`` array with cached total costs, best first."""

    genes: np.ndarray
    fitness: np.ndarray

    def __len__(self):
        return self.genes.shape[0]

    def best(self) -> Individual:
        k = int(np.argmin(self.fitness))
        return Individual(Schedule(self.genes[k]), float(self.fitness[k]))

    def individuals(self) -> list[Individual]:
        return [Individual(Schedule(g), float(f)) for g, f in zip(self.genes, self.fitness)]


class _Problem(NamedTuple):
    x0: float
    cap: float
    pc: float
    pd: float
    floors: np.ndarray
    load: np.ndarray
    gen: np.ndarray
    price: np.ndarray
    rate: float
    literal: bool

    @classmethod
    def from_scenario(cls, s: Scenario, literal: bool = False) -> "_Problem":
        b = s.battery
        return cls(
            s.initial_charge, b.capacity, b.charge_limit, b.discharge_limit,
            np.ascontiguousarray(terminal_floors(s)),
            np.ascontiguousarray(s.load), np.ascontiguousarray(s.generation),
            np.ascontiguousarray(s.tariff.energy_price), s.tariff.demand_rate, literal,
        )

    def costs(self, X: np.ndarray) -> np.ndarray:
        return _kernels.batch_costs(X, self.x0, self.load, self.gen, self.price,
                                    self.rate, self.literal)

    def feasible(self, X: np.ndarray) -> bool:
        return _kernels.all_feasible(X, self.x0, self.cap, self.pc, self.pd,
                                     self.floors, FEASIBILITY_TOL)


class _Evaluator:
    """Fitness evaluation, optionally fanned out over a thread pool.

    Chunks are gathered in index order so results match the serial path.
    """

    def __init__(self, prob: _Problem, parallel: bool = False, workers: int = 4):
        self.prob = prob
        self.workers = workers
        self._pool = ThreadPoolExecutor(max_workers=workers) if parallel else None

    def __call__(self, X: np.ndarray) -> np.ndarray:
        if self._pool is None or X.shape[0] < 2:
            return self.prob.costs(X)
        chunks = np.array_split(X, min(self.workers, X.shape[0]))
        return np.concatenate(list(self._pool.map(self.prob.costs, chunks)))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _ranked(genes: np.ndarray, fitness: np.ndarray, keep: int) -> Population:
    order = np.argsort(fitness, kind="stable")[:keep]
    return Population(genes[order], fitness[order])


def initialize_population(s: Scenario, cfg: RcgaConfig, rng: np.random.Generator) -> Population:
    """N schedules, each gene uniform on the interval left by its predecessor."""
    prob = _Problem.from_scenario(s, cfg.literal_demand_formula)
    return _initialize(prob, s.horizon, cfg.population_n, rng, prob.costs)


def _initialize(prob: _Problem, T: int, n: int, rng, evaluate) -> Population:
    u = rng.random((n, T))
    genes = _kernels.init_population(u, prob.x0, prob.cap, prob.pc, prob.pd, prob.floors)
    assert prob.feasible(genes)
    return _ranked(genes, evaluate(genes), n)


def _as_row(ind: Individual) -> np.ndarray:
    return np.ascontiguousarray(ind.genes.residual, dtype=float).reshape(1, -1)


def blx_crossover(parent_a: Individual, parent_b: Individual, s: Scenario, alpha: float,
                  rng: np.random.Generator, literal_demand_formula: bool = False) -> Individual:
    """One child by BLX-alpha, restricted gene by gene to the feasible interval.

    Gene i is uniform on the blend range ``[min - alpha*w, max + alpha*w]`` of
    the parents' gene i intersected with the interval allowed by the child's
    own gene i-1. If the two do not overlap the feasible interval alone is used.
    """
    prob = _Problem.from_scenario(s, literal_demand_formula)
    u = rng.random((1, s.horizon))
    child = _kernels.blx_offspring(_as_row(parent_a), _as_row(parent_b), u, alpha,
                                   prob.x0, prob.cap, prob.pc, prob.pd, prob.floors)
    return Individual(Schedule(child[0]), float(prob.costs(child)[0]))


def gaussian_mutate(ind: Individual, s: Scenario, pm: float, rng: np.random.Generator,
                    literal_demand_formula: bool = False) -> Individual:
    """Add ``N(0, width_i)`` noise to each gene with probability ``pm``.

    ``width_i`` is the width of the gene's feasible interval given its current
    left neighbour. Out-of-range values snap to the nearest endpoint and the
    genes to the right are clamped in the same pass.
    """
    prob = _Problem.from_scenario(s, literal_demand_formula)
    X = _as_row(ind).copy()
    mask_u = rng.random(X.shape)
    z = rng.standard_normal(X.shape)
    _kernels.mutate_inplace(X, mask_u, z, pm, prob.x0, prob.cap, prob.pc, prob.pd, prob.floors)
    if np.array_equal(X[0], ind.genes.residual):
        return ind
    return Individual(Schedule(X[0]), float(prob.costs(X)[0]))


def _step(pop: Population, prob: _Problem, alpha: float, pm: float,
          rng: np.random.Generator, evaluate) -> Population:
    n, T = pop.genes.shape
    half = n // 2
    perm = rng.permutation(n)
    pa = pop.genes[perm[0::2]]
    pb = pop.genes[perm[1::2]]
    u = rng.random((half, T))
    mask_u = rng.random((half, T))
    z = rng.standard_normal((half, T))

    children = _kernels.blx_offspring(pa, pb, u, alpha, prob.x0, prob.cap, prob.pc,
                                      prob.pd, prob.floors)
    _kernels.mutate_inplace(children, mask_u, z, pm, prob.x0, prob.cap, prob.pc,
                            prob.pd, prob.floors)
    assert prob.feasible(children)

    genes = np.concatenate((pop.genes, children))
    fitness = np.concatenate((pop.fitness, evaluate(children)))
    return _ranked(genes, fitness, n)


def step_generation(pop: Population, s: Scenario, cfg: RcgaConfig,
                    rng: np.random.Generator) -> Population:
    """Advance one generation: N/2 children, then keep the best N of all 3N/2.

    Ties in cost keep parents ahead of children.
    """
    prob = _Problem.from_scenario(s, cfg.literal_demand_formula)
    return _step(pop, prob, cfg.alpha, cfg.pm_for(s.horizon), rng, prob.costs)


@dataclass
class RcgaResult:
    best: Individual
    trace: np.ndarray  # best cost after 0, 1, ..., generations steps
    population: Population


def run(s: Scenario, cfg: RcgaConfig = RcgaConfig()) -> RcgaResult:
    """Run the GA for ``cfg.generations`` generations and return the best schedule."""
    prob = _Problem.from_scenario(s, cfg.literal_demand_formula)
    pm = cfg.pm_for(s.horizon)
    rng = make_rng(cfg.seed)
    trace = np.empty(cfg.generations + 1)
    with _Evaluator(prob, cfg.parallel_fitness, cfg.workers) as evaluate:
        pop = _initialize(prob, s.horizon, cfg.population_n, rng, evaluate)
        trace[0] = pop.fitness[0]
        for g in range(1, cfg.generations + 1):
            pop = _step(pop, prob, cfg.alpha, pm, rng, evaluate)
            trace[g] = pop.fitness[0]
    return RcgaResult(pop.best(), trace, pop)


def warm_up():
    """Compile the kernels so later timings exclude JIT cost."""
    from .domain import BatterySpec, Tariff

    s = Scenario(np.ones(2), np.zeros(2), Tariff(np.ones(2), 1.0), BatterySpec(1.0, 0.5, 0.5))
    run(s, RcgaConfig(population_n=4, generations=1))
