import dataclasses
import json

import numpy as np
import pytest

from hubbid import (
    ClusterSpec,
    DataCenterSpec,
    DeratingProfile,
    EconomicsSpec,
    ExogenousScenario,
    HubSpec,
    InputError,
    PlanningInfeasibleError,
    PpaContract,
    Scenario,
    ScenarioSet,
    SolveOptions,
    TimeGrid,
    WorkloadScenario,
    discrete_cvar,
    extract_vcc,
    load_bid,
    plan_day,
    save_bid,
    write_bid_csv,
    write_vcc_csv,
)
from hubbid.scenarios import redistribute_flexible_uniform

GRID = TimeGrid(1.0, 24)
OPTS = SolveOptions(mip_gap=1e-9)


def series(value, n=24):
    arr = np.asarray(value, dtype=float)
    return np.full(n, float(arr)) if arr.ndim == 0 else arr


def simple_hub(**overrides) -> HubSpec:
    fields = dict(
        datacenter=DataCenterSpec(
            clusters=(
                ClusterSpec(
                    id="c0",
                    capacity={"CPU": 100.0},
                    rho_intercept=5.0,
                    rho_coeff={"CPU": 0.5},
                    mem_ratio={},
                ),
            ),
            pue=1.1,
        ),
        ppa=PpaContract(p_gcp_rated=300.0, p_gcp_min=0.0, t_daily_lim=6.0, t_weekly_lim=20.0),
        economics=EconomicsSpec(carbon_price=0.25, heat_price=0.03),
        bess=None,
        pv=None,
        orc=None,
    )
    fields.update(overrides)
    return HubSpec(**fields)


def exo(spot=80.0, short=None, long=None, carbon=0.3, share=0.5, ghi=0.0, heat=0.0):
    spot = series(spot)
    # imbalance prices are spot multiples, as the calibration produces them;
    # unrelated levels would open riskless day-ahead arbitrage
    return ExogenousScenario(
        spot=spot,
        price_short=series(1.2 * spot if short is None else short),
        price_long=series(0.8 * spot if long is None else long),
        carbon_intensity=series(carbon),
        renewable_share=series(share),
        ghi=series(ghi),
        heat_demand=series(heat),
    )


def workload(cpu=40.0, flex=0.0):
    return WorkloadScenario(
        inelastic={("c0", "CPU"): series(cpu)}, flexible={("c0", "CPU"): flex}
    )


def single_set(exogenous=None, wl=None) -> ScenarioSet:
    return ScenarioSet.single(exogenous or exo(), wl or workload(), GRID)


# --- closed-form oracle: one scenario, no DERs, fixed load --------------------------


def test_no_der_closed_form():
    demand = np.concatenate((np.full(12, 30.0), np.full(12, 70.0)))
    spot = np.linspace(40.0, 120.0, 24)
    hub = simple_hub()
    sset = single_set(exo(spot=spot), workload(cpu=demand))
    bid = plan_day(hub, sset, options=OPTS)

    p_dc = 1.1 * (5.0 + 0.5 * demand)
    expected = float(np.sum(spot * p_dc) + 0.25 * 0.3 * np.sum(p_dc))
    assert bid.day_ahead == pytest.approx(p_dc, abs=1e-6)
    assert bid.expected_cost == pytest.approx(expected, abs=1e-6)
    assert bid.cvar == pytest.approx(expected, abs=1e-6)
    assert bid.objective == pytest.approx(expected, abs=1e-6)
    assert bid.cost_breakdown[0]["imbalance"] == pytest.approx(0.0, abs=1e-6)
    assert bid.cost_breakdown[0]["heat_revenue"] == 0.0
    assert bid.cost_breakdown[0]["bess"] == 0.0
    # single scenario: the VCC is the usage itself, which is the demand
    assert bid.vcc[("c0", "CPU")] == pytest.approx(demand, abs=1e-6)
    assert bid.expected_emissions == pytest.approx(0.3 * np.sum(p_dc), abs=1e-6)


def test_breakdown_sums_to_scenario_cost():
    probs = (0.4, 0.6)
    scenarios = tuple(
        Scenario(exo(spot=s), workload(flex=100.0), p)
        for s, p in zip((60.0, 110.0), probs)
    )
    bid = plan_day(simple_hub(), ScenarioSet(scenarios, GRID), options=OPTS)
    for w in range(2):
        assert sum(bid.cost_breakdown[w].values()) == pytest.approx(
            bid.scenario_costs[w], abs=1e-6
        )
    assert bid.expected_cost == pytest.approx(
        float(np.dot(bid.probabilities, bid.scenario_costs)), abs=1e-9
    )


# --- flexibility lowers cost -----------------------------------------------------


def test_flexible_cheaper_than_uniform_redistribution():
    spot = np.concatenate((np.full(12, 150.0), np.full(12, 30.0)))
    hub = simple_hub()
    wl = workload(cpu=20.0, flex=300.0)
    scenarios = tuple(
        Scenario(exo(spot=spot * f), wl, 0.5) for f in (1.0, 1.2)
    )
    sset = ScenarioSet(scenarios, GRID)
    flexible_bid = plan_day(hub, sset, options=OPTS)

    frozen = tuple(
        dataclasses.replace(
            s, workload=redistribute_flexible_uniform(s.workload, hub.datacenter, GRID)
        )
        for s in scenarios
    )
    uniform_bid = plan_day(hub, ScenarioSet(frozen, GRID), options=OPTS)
    assert flexible_bid.expected_cost <= uniform_bid.expected_cost + 1e-9
    # volatile prices make the gap strict
    assert flexible_bid.expected_cost < uniform_bid.expected_cost - 1.0


# --- CVaR ---------------------------------------------------------------------------


def test_discrete_cvar_examples():
    costs = [10.0, 20.0, 30.0, 40.0]
    probs = [0.25] * 4
    assert discrete_cvar(costs, probs, 0.75) == pytest.approx(40.0)
    assert discrete_cvar(costs, probs, 0.5) == pytest.approx(35.0)
    assert discrete_cvar(costs, probs, 0.0) == pytest.approx(25.0)
    assert discrete_cvar([7.0], [1.0], 0.9) == pytest.approx(7.0)


def test_beta_one_objective_is_tail_cost():
    hub = simple_hub(
        economics=EconomicsSpec(
            carbon_price=0.25, heat_price=0.03, cvar_alpha=0.5, cvar_beta=1.0
        )
    )
    scenarios = tuple(
        Scenario(exo(spot=s), workload(), 0.5) for s in (50.0, 100.0)
    )
    bid = plan_day(hub, ScenarioSet(scenarios, GRID), options=OPTS)
    worse = float(np.max(bid.scenario_costs))
    assert bid.objective == pytest.approx(worse, rel=1e-9)
    assert bid.cvar == pytest.approx(worse, rel=1e-9)
    assert bid.objective == pytest.approx(
        discrete_cvar(bid.scenario_costs, bid.probabilities, 0.5), rel=1e-9
    )


# --- VCC ---------------------------------------------------------------------------


def test_extract_vcc_max_and_quantile():
    dispatch = [
        {"u": {("c0", "CPU"): np.full(4, v)}} for v in (3.0, 7.0, 5.0)
    ]
    assert extract_vcc(dispatch)[("c0", "CPU")] == pytest.approx(np.full(4, 7.0))
    assert extract_vcc(dispatch, quantile=1.0)[("c0", "CPU")] == pytest.approx(
        np.full(4, 7.0)
    )
    assert extract_vcc(dispatch, quantile=0.5)[("c0", "CPU")] == pytest.approx(
        np.full(4, 5.0)
    )
    with pytest.raises(InputError, match="quantile"):
        extract_vcc(dispatch, quantile=0.0)


def test_vcc_within_capacity():
    scenarios = tuple(
        Scenario(exo(), workload(cpu=c, flex=200.0), 0.5) for c in (30.0, 60.0)
    )
    bid = plan_day(simple_hub(), ScenarioSet(scenarios, GRID), options=OPTS)
    assert np.all(bid.vcc[("c0", "CPU")] <= 100.0 + 1e-9)
    assert np.all(bid.vcc[("c0", "CPU")] >= 30.0 - 1e-9)


# --- caps and monotonicity -----------------------------------------------------------


def test_bid_respects_caps():
    caps = DeratingProfile(np.concatenate((np.full(4, 45.0), np.full(20, 300.0))))
    hub = simple_hub(ppa=PpaContract(300.0, 20.0, 6.0, 20.0))
    bid = plan_day(hub, single_set(wl=workload(cpu=60.0)), caps=caps, options=OPTS)
    assert np.all(bid.day_ahead <= caps.cap + 1e-6)
    assert bid.caps == pytest.approx(caps.cap)


def test_tightening_caps_never_lowers_cost():
    hub = simple_hub()
    sset = single_set(wl=workload(cpu=70.0, flex=100.0))
    base = plan_day(hub, sset, options=OPTS)
    caps = DeratingProfile(np.concatenate((np.full(6, 50.0), np.full(18, 300.0))))
    tight = plan_day(hub, sset, caps=caps, options=OPTS)
    assert tight.expected_cost >= base.expected_cost - 1e-9
    assert np.all(tight.day_ahead <= caps.cap + 1e-6)


# --- validation and infeasibility triage ----------------------------------------------


def test_invalid_hub_rejected():
    hub = simple_hub(
        datacenter=DataCenterSpec(
            clusters=simple_hub().datacenter.clusters, pue=0.8
        )
    )
    with pytest.raises(InputError, match="pue"):
        plan_day(hub, single_set())


def test_invalid_caps_rejected():
    hub = simple_hub(ppa=PpaContract(300.0, 25.0, 6.0, 20.0))
    caps = DeratingProfile(np.full(24, 10.0))
    with pytest.raises(InputError, match="de-rating"):
        plan_day(hub, single_set(), caps=caps)


def test_triage_renewable_quota():
    hub = simple_hub(
        economics=EconomicsSpec(
            carbon_price=0.25,
            heat_price=0.03,
            renewable_target=1.0,
            renewable_alpha=0.0,
        )
    )
    with pytest.raises(PlanningInfeasibleError) as err:
        plan_day(hub, single_set())
    assert "renewable" in err.value.hint


def test_triage_flexible_quota():
    # flexible demand above the day's free capacity: only the violation
    # binary can absorb it, and the default quota forbids that
    wl = WorkloadScenario(
        inelastic={("c0", "CPU"): series(50.0)}, flexible={("c0", "CPU"): 2000.0}
    )
    with pytest.raises(PlanningInfeasibleError) as err:
        plan_day(simple_hub(), single_set(wl=wl))
    assert "flexible" in err.value.hint


def test_triage_inelastic_band():
    # caps strangle a few hours below the inelastic power draw while the
    # daily total stays coverable, so only the per-step relaxation helps
    caps = DeratingProfile(np.concatenate((np.full(4, 20.0), np.full(20, 300.0))))
    wl = WorkloadScenario(
        inelastic={("c0", "CPU"): series(80.0)}, flexible={("c0", "CPU"): 10.0}
    )
    with pytest.raises(PlanningInfeasibleError) as err:
        plan_day(simple_hub(), single_set(wl=wl), caps=caps)
    assert "inelastic" in err.value.hint


# --- serialization ---------------------------------------------------------------------


def test_bid_round_trip(tmp_path):
    scenarios = tuple(
        Scenario(exo(spot=s), workload(flex=50.0), 0.5) for s in (60.0, 90.0)
    )
    bid = plan_day(simple_hub(), ScenarioSet(scenarios, GRID), options=OPTS)
    path = tmp_path / "bid.json"
    save_bid(bid, path)
    loaded = load_bid(path)
    assert loaded.scheme == bid.scheme
    assert loaded.day_ahead == pytest.approx(bid.day_ahead)
    assert loaded.expected_cost == bid.expected_cost
    assert loaded.cvar == bid.cvar
    assert loaded.vcc[("c0", "CPU")] == pytest.approx(bid.vcc[("c0", "CPU")])
    assert loaded.per_scenario_dispatch[1]["p_gcp"] == pytest.approx(
        bid.per_scenario_dispatch[1]["p_gcp"]
    )

    save_bid(bid, tmp_path / "again.json")
    assert (tmp_path / "bid.json").read_bytes() == (tmp_path / "again.json").read_bytes()

    doc = json.loads(path.read_text())
    assert doc["schema_version"] == 1
    del doc["day_ahead"]
    with pytest.raises(InputError, match="day_ahead"):
        from hubbid.bidding import bid_from_dict

        bid_from_dict(doc)


def test_bid_csv_layout(tmp_path):
    bid = plan_day(simple_hub(), single_set(), options=OPTS)
    csv = tmp_path / "bid.csv"
    write_bid_csv(bid, csv)
    lines = csv.read_text().splitlines()
    assert lines[0] == "step,day_ahead_kw"
    assert len(lines) == 25
    assert lines[1].startswith("0,")
    float(lines[1].split(",")[1])

    vcc_csv = tmp_path / "vcc.csv"
    write_vcc_csv(bid, "c0", vcc_csv)
    lines = vcc_csv.read_text().splitlines()
    assert lines[0] == "step,CPU"
    assert len(lines) == 25
    with pytest.raises(InputError, match="cluster"):
        write_vcc_csv(bid, "nope", tmp_path / "x.csv")
