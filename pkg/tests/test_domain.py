import numpy as np
import pytest

from ess_rcga.domain import (
    BatterySpec,
    Schedule,
    ScenarioValidationError,
    scenario_violations,
    validate_scenario,
)
from ess_rcga.scenario_io import builtin_battery, builtin_cases

from conftest import make_scenario, zero_scenario


def codes(s):
    return {v.code for v in scenario_violations(s)}


def test_zero_scenario_is_valid():
    s = zero_scenario()
    assert validate_scenario(s) is s


def test_length_mismatch():
    s = make_scenario(np.zeros(23), np.zeros(24), np.ones(24), horizon=24)
    with pytest.raises(ScenarioValidationError) as exc:
        validate_scenario(s)
    assert [v.field for v in exc.value.violations] == ["load"]
    assert exc.value.violations[0].code == "length_mismatch"


def test_x0_out_of_range():
    s = make_scenario(np.zeros(24), np.zeros(24), np.ones(24), x0=2.0)
    assert codes(s) == {"x0_out_of_range"}


def test_empty_horizon():
    s = make_scenario([], [], [])
    assert "empty_horizon" in codes(s)


def test_all_violations_reported_together():
    s = make_scenario(-np.ones(24), np.zeros(3), -np.ones(24), demand_rate=-1,
                      battery=BatterySpec(1.0, -0.1, 0.5), x0=5.0)
    found = scenario_violations(s)
    fields = {v.field for v in found}
    assert {"load", "generation", "tariff.energy_price", "tariff.demand_rate",
            "battery.charge_limit", "initial_charge"} <= fields
    assert {"negative_entry", "length_mismatch", "x0_out_of_range"} <= {v.code for v in found}


def test_types_are_immutable():
    s = zero_scenario()
    with pytest.raises(ValueError):
        s.load[0] = 1.0
    with pytest.raises(AttributeError):
        s.initial_charge = 1.0
    x = Schedule([0.1, 0.2])
    with pytest.raises(ValueError):
        x.residual[0] = 0.0


def test_builtin_cases_validate():
    for s in builtin_cases():
        validate_scenario(s)
        assert s.battery == builtin_battery()


def test_equality_and_replace():
    s = zero_scenario()
    assert s == zero_scenario()
    t = s.replace(initial_charge=0.5)
    assert t != s and t.initial_charge == 0.5 and t.horizon == 24
