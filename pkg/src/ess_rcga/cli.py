"""Command-line driver.

Examples::

    ess-rcga synth --season summer --weather sunny --day-type weekday \\
        --demand-level low --out day.json
    ess-rcga run --scenario day.json --algo all --seed 1 --out report.csv
    ess-rcga run --case 7 --algo rcga --seeds 100
"""

from __future__ import annotations

import argparse
import csv
import os
import statistics
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rcga
from .baselines import npb_schedule
from .cost import UndefinedSavingError, evaluate, no_ess_cost, saving_percent
from .dp_oracle import DpConfig, dp_solve
from .domain import CostBreakdown, Scenario, ScenarioValidationError, Schedule
from .feasibility import is_feasible
from .scenario_io import (
    DAY_TYPES,
    DEMAND_LEVELS,
    SEASONS,
    WEATHERS,
    ScenarioFormatError,
    builtin_scenario,
    load_scenario,
    builtin_cases,
    read_profile_csv,
    save_scenario,
    scenario_from_profile,
)

ALGOS = ("noess", "npb", "rcga", "dp")
REPORT_HEADER = ("algo", "energy_charge", "demand_charge", "total", "peak_net", "saving_pct")
SERIES_HEADER = ("hour", "load", "gen", "price", "residual", "net_grid")


@dataclass
class ReportRow:
    algo: str
    energy_charge: float
    demand_charge: float
    total: float
    peak_net: float
    saving_pct: Optional[float]

    def csv_fields(self) -> list[str]:
        nums = (self.energy_charge, self.demand_charge, self.total, self.peak_net)
        saving = "" if self.saving_pct is None else repr(float(self.saving_pct))
        return [self.algo, *(repr(float(v)) for v in nums), saving]


@dataclass
class AlgoOutcome:
    algo: str
    schedule: Schedule
    cost: CostBreakdown
    std: Optional[ReportRow] = None  # repeated-seed spread, rcga only
    note: str = ""


def _saving(reference: float, total: float) -> Optional[float]:
    try:
        return saving_percent(reference, total)
    except UndefinedSavingError:
        return None


def parse_algos(text: str) -> list[str]:
    names = [a.strip() for a in text.split(",") if a.strip()]
    if not names:
        raise argparse.ArgumentTypeError("no algorithm given")
    out: list[str] = []
    for name in names:
        expanded = ALGOS if name == "all" else (name,)
        for a in expanded:
            if a not in ALGOS:
                raise argparse.ArgumentTypeError(
                    f"unknown algorithm {a!r}; choose from {', '.join(ALGOS)} or all")
            if a not in out:
                out.append(a)
    return out


def _rcga_outcome(s: Scenario, args) -> AlgoOutcome:
    base = dict(
        population_n=args.pop,
        generations=args.gens,
        alpha=args.alpha,
        mutation_rate_pm=args.pm,
        parallel_fitness=args.parallel_fitness,
        literal_demand_formula=args.literal_demand_formula,
    )
    seeds = [args.seed + k for k in range(args.seeds)]
    results = [rcga.run(s, rcga.RcgaConfig(seed=seed, **base)) for seed in seeds]
    costs = [evaluate(s, r.best.genes, args.literal_demand_formula) for r in results]
    best = int(np.argmin([c.total for c in costs]))  # lowest seed wins ties
    if len(results) == 1:
        return AlgoOutcome("rcga", results[0].best.genes, costs[0])

    def column(name):
        return [getattr(c, name) for c in costs]

    mean = CostBreakdown(
        energy_charge=statistics.fmean(column("energy_charge")),
        demand_charge=statistics.fmean(column("demand_charge")),
        total=statistics.fmean(column("total")),
        peak_net=statistics.fmean(column("peak_net")),
        net_series=costs[best].net_series,
    )
    std = ReportRow("rcga_std", *(statistics.stdev(column(n)) for n in
                                  ("energy_charge", "demand_charge", "total", "peak_net")), None)
    note = f"mean of {len(seeds)} seeds {seeds[0]}..{seeds[-1]}; series from seed {seeds[best]}"
    return AlgoOutcome("rcga", results[best].best.genes, mean, std, note)


def solve(s: Scenario, algo: str, args) -> AlgoOutcome:
    literal = args.literal_demand_formula
    if algo == "noess":
        flat = Schedule(np.full(s.horizon, s.initial_charge))
        return AlgoOutcome(algo, flat, no_ess_cost(s, literal))
    if algo == "npb":
        x = npb_schedule(s)
        return AlgoOutcome(algo, x, evaluate(s, x, literal))
    if algo == "rcga":
        return _rcga_outcome(s, args)
    res = dp_solve(s, DpConfig(grid_step=args.grid_step, snap_mode=args.snap_mode), literal)
    note = f"x0 snapped by {res.snap_distance:g} kWh" if res.snap_distance else ""
    return AlgoOutcome(algo, res.schedule, res.cost, note=note)


def build_rows(s: Scenario, outcomes: Sequence[AlgoOutcome], literal: bool) -> list[ReportRow]:
    reference = no_ess_cost(s, literal).total
    rows = []
    for o in outcomes:
        c = o.cost
        rows.append(ReportRow(o.algo, c.energy_charge, c.demand_charge, c.total, c.peak_net,
                              _saving(reference, c.total)))
        if o.std is not None:
            rows.append(o.std)
    return rows


def write_report(rows: Sequence[ReportRow], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for r in rows:
        writer.writerow(r.csv_fields())


def format_table(s: Scenario, outcomes: Sequence[AlgoOutcome], literal: bool) -> str:
    """Human-readable summary; repeated-seed totals print as ``mean (std)``."""
    reference = no_ess_cost(s, literal).total
    lines = [f"scenario: {s.name or '(unnamed)'}  T={s.horizon}  "
             f"demand rate={s.tariff.demand_rate:g} c/kW  (costs in cents)"]
    lines.append(f"{'algo':<6} {'energy':>10} {'demand':>10} {'total':>16} {'peak kWh':>9} "
                 f"{'saving %':>12} {'rounded':>8}")
    for o in outcomes:
        c = o.cost
        total = f"{c.total:.2f}"
        if o.std is not None:
            total += f" ({o.std.total:.2f})"
        saving = _saving(reference, c.total)
        full = "n/a" if saving is None else f"{saving:.6f}"
        rounded = "n/a" if saving is None else f"{round(saving):d}"
        lines.append(f"{o.algo:<6} {c.energy_charge:>10.2f} {c.demand_charge:>10.2f} "
                     f"{total:>16} {c.peak_net:>9.3f} {full:>12} {rounded:>8}")
        if o.note:
            lines.append(f"       {o.note}")
    return "\n".join(lines)


def emit_series(s: Scenario, schedule: Schedule, path) -> None:
    """Hourly plot data: ``hour,load,gen,price,residual,net_grid``."""
    is_feasible(schedule, s).raise_if_infeasible()
    res = schedule.residual
    prev = np.concatenate(([s.initial_charge], res[:-1]))
    net = res - prev + s.load - s.generation
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_HEADER)
        for h in range(s.horizon):
            writer.writerow([h, *(repr(float(v)) for v in (
                s.load[h], s.generation[h], s.tariff.energy_price[h], res[h], net[h]))])


def _series_path(base: str, algo: str, many: bool) -> str:
    if not many:
        return base
    root, ext = os.path.splitext(base)
    return f"{root}_{algo}{ext or '.csv'}"


def _load(args) -> Scenario:
    if args.case is not None:
        return builtin_cases()[args.case - 1]
    return load_scenario(args.scenario)


def cmd_run(args) -> int:
    try:
        s = _load(args)
    except (ScenarioFormatError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 1

    outcomes = [solve(s, algo, args) for algo in args.algo]
    literal = args.literal_demand_formula
    print(format_table(s, outcomes, literal))
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                write_report(build_rows(s, outcomes, literal), fh)
        if args.emit_series:
            for o in outcomes:
                emit_series(s, o.schedule, _series_path(args.emit_series, o.algo,
                                                        len(outcomes) > 1))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_synth(args) -> int:
    s = builtin_scenario(args.season, args.weather, args.day_type, args.demand_level,
                         seed=args.seed, scale=args.scale)
    try:
        save_scenario(args.out, s)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_import_csv(args) -> int:
    try:
        load, gen = read_profile_csv(args.profile)
        s = scenario_from_profile(load, gen, args.season, args.demand_level,
                                  name=args.name, initial_charge=args.x0)
        save_scenario(args.out, s)
    except (ScenarioFormatError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _even_pop(text):
    v = int(text)
    if v < 2 or v % 2:
        raise argparse.ArgumentTypeError("population must be even and >= 2")
    return v


def _probability(text):
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ess-rcga", description=(
        "Schedule a home battery against time-of-use prices and a demand charge."))
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one or more algorithms on a scenario")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", metavar="PATH", help="scenario document (JSON)")
    src.add_argument("--case", type=int, choices=range(1, 17), metavar="{1..16}",
                     help="built-in synthetic case in table order")
    r.add_argument("--algo", type=parse_algos, default=["noess", "npb", "rcga"],
                   help="comma list of noess,npb,rcga,dp or 'all' (default noess,npb,rcga)")
    r.add_argument("--seed", type=_nonneg_int, default=0, help="GA seed (default 0)")
    r.add_argument("--seeds", type=_pos_int, default=1,
                   help="repeat the GA over seeds seed..seed+K-1 and report mean (std)")
    r.add_argument("--pop", type=_even_pop, default=100, help="population size (default 100)")
    r.add_argument("--gens", type=_nonneg_int, default=2000, help="generations (default 2000)")
    r.add_argument("--alpha", type=_nonneg_float, default=0.5, help="BLX alpha (default 0.5)")
    r.add_argument("--pm", type=_probability, default=None,
                   help="per-gene mutation probability (default 0.1/T)")
    r.add_argument("--grid-step", type=_positive_float, default=0.05,
                   help="DP state grid step in kWh (default 0.05)")
    r.add_argument("--snap-mode", choices=("floor", "nearest"), default="floor",
                   help="how the DP maps an off-grid x0 onto the grid")
    r.add_argument("--literal-demand-formula", action="store_true",
                   help="bill the raw peak net draw even when it is negative")
    r.add_argument("--parallel-fitness", action="store_true",
                   help="evaluate GA offspring on a thread pool (results unchanged)")
    r.add_argument("--out", metavar="PATH", help="write the CSV report here")
    r.add_argument("--emit-series", metavar="PATH",
                   help="write hourly series CSV (suffixed _ALGO when several algos run)")
    r.set_defaults(func=cmd_run)

    sy = sub.add_parser("synth", help="write a synthetic built-in scenario document")
    sy.add_argument("--season", choices=SEASONS, required=True)
    sy.add_argument("--weather", choices=WEATHERS, required=True)
    sy.add_argument("--day-type", choices=DAY_TYPES, required=True)
    sy.add_argument("--demand-level", choices=DEMAND_LEVELS, required=True)
    sy.add_argument("--seed", type=_nonneg_int, default=0)
    sy.add_argument("--scale", type=_positive_float, default=None, help="daily load in kWh")
    sy.add_argument("--out", required=True, metavar="PATH")
    sy.set_defaults(func=cmd_synth)

    im = sub.add_parser("import-csv", help="build a scenario from an hour,load_kwh,gen_kwh CSV")
    im.add_argument("profile", metavar="CSV")
    im.add_argument("--season", choices=SEASONS, required=True)
    im.add_argument("--demand-level", choices=DEMAND_LEVELS, required=True)
    im.add_argument("--name", default="")
    im.add_argument("--x0", type=_nonneg_float, default=0.0, help="initial charge in kWh")
    im.add_argument("--out", required=True, metavar="PATH")
    im.set_defaults(func=cmd_import_csv)
    return p


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and execute; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
