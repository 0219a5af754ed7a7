"""Battery charge scheduling under time-of-use pricing with a demand charge."""

from .baselines import npb_cost, npb_schedule
from .cost import evaluate, net_series, no_ess_cost, saving_percent
from .domain import (
    BatterySpec,
    CostBreakdown,
    Scenario,
    ScenarioMeta,
    Schedule,
    Tariff,
    validate_scenario,
)
from .dp_oracle import DpConfig, brute_force_solve, dp_solve
from .rcga import RcgaConfig, run

__all__ = [
    "BatterySpec", "CostBreakdown", "DpConfig", "RcgaConfig", "Scenario", "ScenarioMeta",
    "Schedule", "Tariff", "brute_force_solve", "dp_solve", "evaluate", "net_series",
    "no_ess_cost", "npb_cost", "npb_schedule", "run", "saving_percent", "validate_scenario",
]
