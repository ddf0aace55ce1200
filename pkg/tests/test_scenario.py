import json

import pytest

from nrini.numerology import NumerologyError
from nrini.scenario import (
    ScenarioHorizonError,
    ServiceSpec,
    guard_khz,
    load_scenario,
    plan_scenario,
)


def three(n_rb):
    return [ServiceSpec(mu, n_rb) for mu in (0, 1, 2)]


def test_service_bandwidth():
    assert ServiceSpec(1, 5).bandwidth_khz == 1800.0
    with pytest.raises(NumerologyError):
        ServiceSpec(0, 0)


@pytest.mark.parametrize("direction", ["both", "lower-victim"])
@pytest.mark.parametrize("reduction", ["normalized", "direct"])
def test_same_numerology_one_subcarrier(direction, reduction):
    plan = plan_scenario([ServiceSpec(1, 200), ServiceSpec(1, 200)], 40, direction, reduction)
    assert plan.guard_bands_khz == [30.0]
    assert plan.efficiency > 0.99


def test_single_service():
    plan = plan_scenario([ServiceSpec(2, 7)], 30)
    assert plan.guard_bands_khz == [] and plan.efficiency == 1.0


def test_sum_check_and_bounds():
    plan = plan_scenario(three(10), 30)
    assert plan.total_bandwidth_khz == sum(s.bandwidth_khz for s in plan.services) + sum(plan.guard_bands_khz)
    assert 0 < plan.efficiency <= 1
    assert all(g >= 0 for g in plan.guard_bands_khz)
    b = plan.boundaries[0]
    assert b.guard_khz == max(b.upward_khz, b.downward_khz)


def test_lower_victim_only_protects_lower_numerology():
    plan = plan_scenario(three(5), 30, direction="lower-victim")
    for b in plan.boundaries:
        assert b.upward_khz is None
        assert b.downward_khz == b.guard_khz


@pytest.mark.parametrize("target", [25, 30, 40])
def test_efficiency_rises_with_allocation(target):
    eff = [plan_scenario(three(n), target).efficiency for n in (5, 10, 25)]
    assert eff[0] < eff[1] < eff[2]


@pytest.mark.parametrize("n_rb", [5, 10, 25])
def test_efficiency_falls_with_target(n_rb):
    eff = [plan_scenario(three(n_rb), t).efficiency for t in (25, 30, 40)]
    assert eff[0] > eff[1] > eff[2]


def test_table_examples():
    p = plan_scenario(three(5), 25)
    assert p.total_bandwidth_khz / 1e3 == pytest.approx(7.56, rel=0.10)
    assert 100 * p.efficiency == pytest.approx(83.3, abs=5)
    p = plan_scenario(three(25), 40)
    assert 100 * p.efficiency == pytest.approx(54.1, rel=0.10)


def test_normalized_reduction_uses_victim_spacing():
    # mu=2 -> mu=1 dimensioned as mu=1 -> mu=0, then scaled by the 30 kHz victim spacing
    a = guard_khz(ServiceSpec(2, 5), ServiceSpec(1, 5), 25)
    b = guard_khz(ServiceSpec(1, 5), ServiceSpec(0, 5), 25)
    assert a == 2 * b


def test_direct_reduction_hits_grid_periodicity():
    with pytest.raises(ScenarioHorizonError) as info:
        plan_scenario(three(25), 40, reduction="direct")
    assert (info.value.lower.mu, info.value.upper.mu) == (1, 2)


def test_json_round_trip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"services": [{"mu": 0, "n_rb": 5}, {"mu": 1, "n_rb": 5}], "target_db": 25}))
    services, target = load_scenario(path)
    assert services == [ServiceSpec(0, 5), ServiceSpec(1, 5)] and target == 25
    d = plan_scenario(services, target).to_dict()
    assert d["guard_bands_khz"] == [420.0]
    assert d["total_bandwidth_khz"] == 3120.0
    path.write_text("{}")
    with pytest.raises(NumerologyError):
        load_scenario(path)


def test_bad_options():
    with pytest.raises(ValueError):
        plan_scenario(three(5), 25, direction="sideways")
    with pytest.raises(ValueError):
        plan_scenario(three(5), 25, reduction="magic")
    with pytest.raises(NumerologyError):
        plan_scenario([], 25)
