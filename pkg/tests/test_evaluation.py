import numpy as np
import pytest

from hubbid import (
    DeratingProfile,
    EconomicsSpec,
    PlanningInfeasibleError,
    RealizedDay,
    Scenario,
    ScenarioSet,
    SolveOptions,
    compare_schemes,
    evaluate_day,
    evaluate_days,
    expost_reoptimize,
    plan_day,
    summarize,
    write_outcomes_csv,
)
from hubbid.errors import BuildError
from hubbid.evaluation import DayOutcome, EvaluationReport, report_to_dict

from test_bidding import GRID, OPTS, exo, series, simple_hub, single_set, workload


def outcome_stub(cost, **overrides) -> DayOutcome:
    fields = dict(
        date="2025-01-01",
        scheme="custom",
        ex_post_cost=cost,
        ex_post_emissions=cost / 10.0,
        ex_ante_cost=cost,
        ex_ante_emissions=cost / 10.0,
        imbalance_energy=0.0,
        renewable_share=0.5,
        cost_breakdown={},
    )
    fields.update(overrides)
    return DayOutcome(**fields)


# --- ex-post re-optimization -----------------------------------------------------


def test_perfect_foresight_has_zero_imbalance():
    hub = simple_hub()
    sset = single_set()
    bid = plan_day(hub, sset, options=OPTS)
    realized = RealizedDay(sset.scenarios[0].exogenous, sset.scenarios[0].workload)
    outcome = expost_reoptimize(hub, bid, realized, OPTS)
    assert outcome.imbalance_energy == pytest.approx(0.0, abs=1e-6)
    assert outcome.ex_post_cost == pytest.approx(bid.expected_cost, abs=1e-4)
    assert outcome.ex_ante_cost == bid.expected_cost


def test_in_sample_replay_matches_planned_scenario_costs():
    hub = simple_hub()
    scenarios = tuple(
        Scenario(exo(spot=s), workload(flex=80.0), 0.5) for s in (55.0, 105.0)
    )
    sset = ScenarioSet(scenarios, GRID)
    bid = plan_day(hub, sset, options=OPTS)
    for w, scen in enumerate(sset.scenarios):
        outcome = expost_reoptimize(
            hub, bid, RealizedDay(scen.exogenous, scen.workload), OPTS
        )
        planned = bid.scenario_costs[w]
        assert outcome.ex_post_cost == pytest.approx(planned, rel=1e-6, abs=1e-4)


def test_realized_excess_load_becomes_shortage_power():
    hub = simple_hub()
    demand = series(40.0)
    sset = single_set(wl=workload(cpu=demand))
    bid = plan_day(hub, sset, options=OPTS)

    bumped = demand.copy()
    bumped[5] += 10.0 / (1.1 * 0.5)
    realized = RealizedDay(
        sset.scenarios[0].exogenous,
        workload(cpu=bumped),
    )
    outcome = expost_reoptimize(hub, bid, realized, OPTS)
    assert outcome.dispatch["p_plus"][5] == pytest.approx(10.0, abs=1e-6)
    assert outcome.imbalance_energy == pytest.approx(10.0, abs=1e-6)


def test_frozen_bid_never_beats_hindsight():
    hub = simple_hub()
    sset = single_set()
    bid = plan_day(hub, sset, options=OPTS)
    realized_wl = workload(cpu=60.0)
    realized = RealizedDay(sset.scenarios[0].exogenous, realized_wl)
    frozen = expost_reoptimize(hub, bid, realized, OPTS)
    hindsight = plan_day(
        hub, single_set(wl=realized_wl), options=OPTS
    )
    assert frozen.ex_post_cost >= hindsight.expected_cost - 1e-6


def test_expost_enforces_renewable_quota_with_single_scenario():
    hub = simple_hub(
        economics=EconomicsSpec(
            carbon_price=0.25,
            heat_price=0.03,
            renewable_target=1.0,
            renewable_alpha=0.25,
        )
    )
    # only the last scenario falls short of the target; its probability fits
    # inside the quota, so planning succeeds
    scenarios = tuple(
        Scenario(exo(share=s), workload(), 0.25) for s in (1.0, 1.0, 1.0, 0.5)
    )
    sset = ScenarioSet(scenarios, GRID)
    bid = plan_day(hub, sset, options=OPTS)
    realized = RealizedDay(scenarios[-1].exogenous, scenarios[-1].workload)
    with pytest.raises(PlanningInfeasibleError) as err:
        expost_reoptimize(hub, bid, realized, OPTS)
    assert "renewable" in err.value.hint


def test_grid_mismatch_rejected():
    hub = simple_hub()
    sset = single_set()
    bid = plan_day(hub, sset, options=OPTS)
    exo_cls = type(sset.scenarios[0].exogenous)
    wl_cls = type(sset.scenarios[0].workload)
    short_exo = exo_cls(
        spot=np.full(12, 80.0),
        price_short=np.full(12, 96.0),
        price_long=np.full(12, 64.0),
        carbon_intensity=np.full(12, 0.3),
        renewable_share=np.full(12, 0.5),
        ghi=np.full(12, 0.0),
        heat_demand=np.full(12, 0.0),
    )
    short_wl = wl_cls(inelastic={("c0", "CPU"): np.full(12, 40.0)}, flexible={})
    realized = RealizedDay(short_exo, short_wl)
    with pytest.raises(BuildError, match="steps"):
        expost_reoptimize(hub, bid, realized, OPTS)


# --- summaries ------------------------------------------------------------------


def test_summarize_single_day():
    report = summarize([outcome_stub(100.0)])
    cost = report["ex_post_cost"]
    assert cost["q25"] == cost["mean"] == cost["q75"] == 100.0
    assert cost["std"] == 0.0


def test_summarize_hand_statistics():
    outcomes = [outcome_stub(c) for c in (1.0, 2.0, 3.0, 4.0)]
    cost = summarize(outcomes)["ex_post_cost"]
    assert cost["mean"] == pytest.approx(2.5)
    assert cost["std"] == pytest.approx(np.sqrt(1.25))
    assert cost["q25"] == pytest.approx(1.75)
    assert cost["q75"] == pytest.approx(3.25)


def test_report_summary_is_recomputable():
    outcomes = [outcome_stub(c) for c in (10.0, 30.0)]
    report = EvaluationReport.build("custom", outcomes)
    assert report.summary == summarize(outcomes)
    doc = report_to_dict(report)
    assert doc["scheme"] == "custom"
    assert len(doc["days"]) == 2
    assert doc["summary"]["ex_post_cost"]["mean"] == pytest.approx(20.0)


def test_outcomes_csv_layout(tmp_path):
    outcomes = [
        outcome_stub(12.5, date="2025-03-01"),
        outcome_stub(14.0, date="2025-03-02", scheme="tou"),
    ]
    path = tmp_path / "outcomes.csv"
    write_outcomes_csv(outcomes, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "date,scheme,cost_eur,emissions_kg,imbalance_kwh,renshare"
    assert lines[1].startswith("2025-03-01,custom,12.5,")
    assert lines[2].startswith("2025-03-02,tou,14.0,")


# --- scheme comparison -------------------------------------------------------------


def _flat_price_day(spot=80.0, flex=60.0):
    e = exo(spot=spot, short=spot, long=spot)
    wl = workload(flex=flex)
    sset = ScenarioSet.single(e, wl, GRID)
    realized = RealizedDay(e, wl, date="2025-06-01")
    return sset, realized


def test_equal_prices_make_schemes_equivalent():
    tariff = np.full(24, 80.0)
    hub = simple_hub(
        economics=EconomicsSpec(carbon_price=0.25, heat_price=0.03, tou_tariff=tariff)
    )
    sset, realized = _flat_price_day()
    cmp = compare_schemes(hub, [sset], [realized], schemes=("custom", "tou"), options=OPTS)
    delta = cmp.deltas["tou"]["mean_ex_post_cost_pct"]
    assert delta == pytest.approx(0.0, abs=1e-6)


def test_volatile_spot_favors_custom_scheme():
    spot = np.concatenate((np.full(12, 140.0), np.full(12, 20.0)))
    tariff = np.full(24, float(spot.mean()))
    hub = simple_hub(
        economics=EconomicsSpec(carbon_price=0.25, heat_price=0.03, tou_tariff=tariff)
    )
    e = exo(spot=spot)
    wl = workload(cpu=20.0, flex=240.0)
    sset = ScenarioSet.single(e, wl, GRID)
    realized = RealizedDay(e, wl, date="2025-06-02")
    cmp = compare_schemes(
        hub,
        [sset],
        [realized],
        schemes=("custom", "tou", "custom_noflex"),
        options=OPTS,
    )
    mean = lambda s: cmp.reports[s].summary["ex_post_cost"]["mean"]
    assert mean("custom") < mean("tou") - 1.0
    assert mean("custom") <= mean("custom_noflex") + 1e-9
    assert set(cmp.reports) == {"custom", "tou", "custom_noflex"}
    assert cmp.deltas["tou"]["mean_ex_post_cost_pct"] > 0
    # no-flex rows keep the realized day comparable: same total demand
    noflex = cmp.reports["custom_noflex"].outcomes[0]
    assert noflex.scheme == "custom_noflex"


def test_evaluate_days_parallel_matches_serial():
    hub = simple_hub()
    days = []
    realized = []
    for spot in (70.0, 90.0, 110.0):
        sset, real = _flat_price_day(spot=spot, flex=40.0)
        days.append(sset)
        realized.append(real)
    serial = evaluate_days(hub, days, realized, options=OPTS, jobs=1)
    parallel = evaluate_days(hub, days, realized, options=OPTS, jobs=3)
    for a, b in zip(serial.outcomes, parallel.outcomes):
        assert a.ex_post_cost == pytest.approx(b.ex_post_cost, abs=1e-9)
    assert serial.summary == parallel.summary


def test_evaluate_day_scheme_label_and_caps():
    hub = simple_hub()
    sset, realized = _flat_price_day(flex=0.0)
    profile = np.full(24, 300.0)
    profile[10:14] = 200.0
    caps = DeratingProfile(profile)
    bid, outcome = evaluate_day(hub, sset, realized, "custom", caps=caps, options=OPTS)
    assert outcome.scheme == "custom"
    assert bid.caps == pytest.approx(profile)
    assert outcome.date == "2025-06-01"
