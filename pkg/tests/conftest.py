import numpy as np
import pytest

from ess_rcga import rcga
from ess_rcga.domain import BatterySpec, Scenario, Tariff
from ess_rcga.scenario_io import builtin_battery, builtin_tariff

REF_BATTERY = BatterySpec(1.8, 0.6, 0.6)


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    rcga.warm_up()


@pytest.fixture
def ref_battery():
    return builtin_battery()


def make_scenario(load, gen, price, demand_rate=20.0, battery=REF_BATTERY, x0=0.0, **kw):
    return Scenario(np.asarray(load, float), np.asarray(gen, float),
                    Tariff(np.asarray(price, float), demand_rate), battery,
                    initial_charge=x0, **kw)


def zero_scenario(T=24):
    return make_scenario(np.zeros(T), np.zeros(T), builtin_tariff("summer", "low").energy_price[:T])


def random_scenario(rng, T=24, battery=REF_BATTERY, x0=None, demand_rate=None, cyclic=False):
    """Random day with TOU-like prices; PV only in the middle of the horizon."""
    load = rng.uniform(0.0, 2.0, T)
    gen = rng.uniform(0.0, 2.0, T) * (rng.random(T) < 0.5)
    price = rng.choice([5.0, 10.0, 15.0], T)
    if x0 is None:
        x0 = rng.uniform(0, battery.capacity)
    if demand_rate is None:
        demand_rate = rng.choice([0.0, 20.0, 30.0])
    return make_scenario(load, gen, price, demand_rate, battery, x0, cyclic=cyclic)


def random_feasible(rng, s, n=1):
    """Feasible schedules by an independent route: random steps clipped to the charge limits."""
    b = s.battery
    out = np.empty((n, s.horizon))
    for k in range(n):
        prev = s.initial_charge
        for i in range(s.horizon):
            lo = max(0.0, prev - b.discharge_limit)
            hi = min(b.capacity, prev + b.charge_limit)
            prev = rng.uniform(lo, hi)
            out[k, i] = prev
    return out
