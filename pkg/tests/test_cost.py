import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ess_rcga.cost import (
    UndefinedSavingError,
    evaluate,
    net_series,
    no_ess_cost,
    saving_percent,
    total_costs,
)
from ess_rcga.domain import BatterySpec, InfeasibleScheduleError

from conftest import make_scenario, random_feasible, random_scenario, zero_scenario


def test_net_series_flat_identity():
    s = make_scenario([0.4, 0.7, 0.1], [0.4, 0.7, 0.1], [5, 5, 5], x0=0.9)
    assert np.array_equal(net_series(s, [0.9, 0.9, 0.9]), np.zeros(3))


def test_net_series_hand_values():
    s = make_scenario([1, 1], [0, 0], [5, 10])
    np.testing.assert_allclose(net_series(s, [0.6, 0.0]), [1.6, 0.4], atol=1e-12)
    s1 = make_scenario([0.0], [0.5], [5])
    np.testing.assert_allclose(net_series(s1, [0.0]), [-0.5], atol=1e-12)


def test_net_series_rejects_infeasible():
    s = make_scenario([1, 1], [0, 0], [5, 10])
    with pytest.raises(InfeasibleScheduleError) as exc:
        net_series(s, [0.6, 1.3])
    assert exc.value.index == 1


def test_evaluate_zero():
    s = zero_scenario()
    assert evaluate(s, np.zeros(24)).total == 0.0


def test_evaluate_hand_example():
    s = make_scenario([1, 1], [0, 0], [5, 10], demand_rate=20)
    c = evaluate(s, [0, 0])
    assert c.energy_charge == pytest.approx(15, abs=1e-9)
    assert c.demand_charge == pytest.approx(20, abs=1e-9)
    assert c.total == pytest.approx(35, abs=1e-9)
    assert c.peak_net == 1.0


def test_demand_clamp_and_literal():
    s = make_scenario([0, 0], [1, 0], [5, 10], demand_rate=20)
    c = evaluate(s, [0.6, 0.0])
    np.testing.assert_allclose(c.net_series, [-0.4, -0.6], atol=1e-12)
    assert c.energy_charge == 0.0 and c.demand_charge == 0.0 and c.total == 0.0
    lit = evaluate(s, [0.6, 0.0], literal_demand_formula=True)
    assert lit.demand_charge == pytest.approx(-0.4 * 20, abs=1e-9)
    assert lit.total == pytest.approx(-8.0, abs=1e-9)


def test_indicator_is_strict():
    # net exactly zero in hour 0 contributes nothing
    s = make_scenario([0.5, 1.0], [0.5, 0.0], [100, 1], demand_rate=0)
    assert evaluate(s, [0.0, 0.0]).energy_charge == 1.0


def test_no_ess_cost():
    assert no_ess_cost(zero_scenario()).total == 0.0
    s = make_scenario([1, 1], [0, 0], [5, 10], demand_rate=20)
    assert no_ess_cost(s).total == pytest.approx(35, abs=1e-9)


def test_no_ess_matches_flat_schedule():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = random_scenario(rng)
        flat = np.full(s.horizon, s.initial_charge)
        assert no_ess_cost(s).total == pytest.approx(evaluate(s, flat).total, abs=1e-9)


def test_saving_percent():
    assert round(saving_percent(83.69, 68.76)) == 18
    assert saving_percent(83.69, 68.76) == pytest.approx(17.8396, abs=1e-4)
    assert saving_percent(233.26, 233.26) == 0.0
    assert saving_percent(7.0, 7.0) == 0.0
    with pytest.raises(UndefinedSavingError):
        saving_percent(0.0, 1.0)


def test_total_is_sum_of_parts():
    rng = np.random.default_rng(4)
    for _ in range(100):
        s = random_scenario(rng)
        c = evaluate(s, random_feasible(rng, s)[0])
        assert c.total == c.energy_charge + c.demand_charge
        assert c.energy_charge >= 0


def test_batch_matches_single():
    rng = np.random.default_rng(5)
    s = random_scenario(rng)
    X = random_feasible(rng, s, 40)
    expect = [evaluate(s, x).total for x in X]
    np.testing.assert_allclose(total_costs(s, X), expect, rtol=0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(0, 3))
def test_translation_invariance(seed, c):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng)
    x = random_feasible(rng, s)[0]
    shifted = s.replace(load=s.load + c)
    np.testing.assert_allclose(net_series(shifted, x) - net_series(s, x), c, atol=1e-12)
    delta = evaluate(shifted, x).energy_charge - evaluate(s, x).energy_charge
    assert -1e-9 <= delta <= c * s.tariff.energy_price.sum() + 1e-9


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_zero_battery_equivalence(seed):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng, battery=BatterySpec(0.0, 0.6, 0.6), x0=0.0)
    assert evaluate(s, np.zeros(s.horizon)).total == no_ess_cost(s).total


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.floats(0, 10))
def test_demand_term_scales_linearly(seed, k):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng, demand_rate=20.0)
    x = random_feasible(rng, s)[0]
    scaled = s.replace(tariff=s.tariff.replace(demand_rate=20.0 * k))
    assert evaluate(scaled, x).demand_charge == pytest.approx(
        k * evaluate(s, x).demand_charge, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_energy_charge_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng)
    x = random_feasible(rng, s)[0]
    base = net_series(s, x)
    perm = rng.permutation(s.horizon)
    # rebuild a scenario whose hours are permuted, keeping each hour's net draw
    permuted = s.replace(load=base[perm], generation=np.zeros(s.horizon),
                         tariff=s.tariff.replace(energy_price=s.tariff.energy_price[perm]),
                         initial_charge=0.0)
    flat = np.zeros(s.horizon)
    np.testing.assert_allclose(net_series(permuted, flat), base[perm], atol=1e-12)
    assert evaluate(permuted, flat).energy_charge == pytest.approx(
        evaluate(s, x).energy_charge, abs=1e-9)
