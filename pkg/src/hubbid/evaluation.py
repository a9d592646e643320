"""Ex-post evaluation: re-optimize against realized data with the bid frozen.

The realized day becomes a single scenario with probability 1 and the model
is rebuilt exactly as in planning, so the chance-constraint quotas collapse
on their own: a violation binary is admissible only when its quota is >= 1.
The day-ahead profile is pinned to the submitted bid; only recourse
(imbalance, storage, heat, workload shifting within limits) is re-decided.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bidding import BidResult, extract_bid, plan_day
from .domain.types import (
    DeratingProfile,
    HubSpec,
    RealizedDay,
    ScenarioSet,
    TimeGrid,
)
from .errors import BackendError, InputError, PlanningInfeasibleError
from .model.builder import build_hub_model
from .scenarios.workload import redistribute_flexible_uniform
from .solver.backends import solve
from .solver.checker import check_solution, solution_invariants
from .solver.options import INFEASIBLE, UNBOUNDED, SolveOptions

REPORT_SCHEMA_VERSION = 1

METRICS = (
    "ex_post_cost",
    "ex_post_emissions",
    "ex_ante_cost",
    "ex_ante_emissions",
    "imbalance_energy",
    "renewable_share",
)


@dataclass
class DayOutcome:
    """Realized metrics for one day under one supply scheme."""

    date: str
    scheme: str
    ex_post_cost: float
    ex_post_emissions: float
    ex_ante_cost: float
    ex_ante_emissions: float
    imbalance_energy: float
    renewable_share: float
    cost_breakdown: dict[str, float]
    dispatch: dict = field(default_factory=dict, repr=False)
    status: str = "optimal"
    gap: float | None = None
    solve_time: float = 0.0


@dataclass
class EvaluationReport:
    """Per-day outcomes plus the distribution summary per metric."""

    scheme: str
    outcomes: list[DayOutcome]
    summary: dict[str, dict[str, float]]

    @classmethod
    def build(cls, scheme: str, outcomes: Sequence[DayOutcome]) -> "EvaluationReport":
        return cls(scheme, list(outcomes), summarize(outcomes))


def summarize(outcomes: Sequence[DayOutcome]) -> dict[str, dict[str, float]]:
    """Lower quartile, mean, upper quartile and population std per metric."""
    if not outcomes:
        raise InputError("no outcomes to summarize")
    out: dict[str, dict[str, float]] = {}
    for metric in METRICS:
        vals = np.array([getattr(o, metric) for o in outcomes], dtype=float)
        out[metric] = {
            "q25": float(np.quantile(vals, 0.25)),
            "mean": float(vals.mean()),
            "q75": float(np.quantile(vals, 0.75)),
            "std": float(vals.std()),
        }
    return out


def _expost_triage(
    spec: HubSpec,
    sset: ScenarioSet,
    caps: DeratingProfile,
    bid: BidResult,
    options: SolveOptions,
) -> str:
    from .bidding import _relaxed, _TRIAGE

    for families in _TRIAGE:
        b = build_hub_model(
            _relaxed(spec, families),
            sset,
            caps,
            scheme=bid.scheme,
            native_sos2=options.native_sos2,
        )
        if bid.scheme == "custom":
            b.fix_day_ahead(bid.day_ahead)
        if solve(b.model, options).status not in (INFEASIBLE, UNBOUNDED):
            return (
                f"the {families[-1]} constraints bind under the frozen bid "
                f"(feasible once {', '.join(families)} quotas are relaxed)"
            )
    if bid.scheme == "custom":
        b = build_hub_model(
            _relaxed(spec, _TRIAGE[-1]),
            sset,
            caps,
            scheme=bid.scheme,
            native_sos2=options.native_sos2,
        )
        if solve(b.model, options).status not in (INFEASIBLE, UNBOUNDED):
            return "the frozen day-ahead bid itself is infeasible for the realized day"
    return "infeasible regardless of quota relaxation or the bid; check input data"


def expost_reoptimize(
    spec: HubSpec,
    bid: BidResult,
    realized: RealizedDay,
    options: SolveOptions | None = None,
) -> DayOutcome:
    """Re-optimize one realized day with the day-ahead bid enforced."""
    options = options or SolveOptions()
    if bid.scheme == "custom" and bid.day_ahead is None:
        raise InputError("bid has no day-ahead profile to enforce")
    grid = TimeGrid(bid.step_hours, bid.steps_per_day)
    sset = ScenarioSet.single(realized.exogenous, realized.workload, grid)
    caps = DeratingProfile(bid.caps)

    builder = build_hub_model(
        spec, sset, caps, scheme=bid.scheme, native_sos2=options.native_sos2
    )
    if bid.scheme == "custom":
        builder.fix_day_ahead(bid.day_ahead)
    sol = solve(builder.model, options)
    if sol.status == INFEASIBLE:
        hint = _expost_triage(spec, sset, caps, bid, options)
        raise PlanningInfeasibleError(
            "realized day is infeasible under the frozen bid", hint=hint
        )
    if sol.status == UNBOUNDED or not sol.ok:
        raise BackendError(f"solver returned no usable solution (status {sol.status})")
    violations = check_solution(builder.model, sol.values)
    violations += solution_invariants(builder, sol.values)
    if violations:
        raise BackendError(
            f"{len(violations)} integrity violations, first: {violations[0]}"
        )

    result = extract_bid(builder, sol)
    dispatch = result.per_scenario_dispatch[0]
    dt = bid.step_hours
    if "p_plus" in dispatch:
        imbalance = float(np.sum(dispatch["p_plus"] + dispatch["p_minus"]) * dt)
    else:
        imbalance = 0.0
    e_dc = float(np.sum(dispatch["p_dc"]) * dt)
    e_nonren = float(dispatch["e_nonren"][-1])
    renshare = 1.0 - e_nonren / e_dc if e_dc > 0 else 1.0

    return DayOutcome(
        date=realized.date,
        scheme=bid.scheme,
        ex_post_cost=float(result.scenario_costs[0]),
        ex_post_emissions=float(result.scenario_emissions[0]),
        ex_ante_cost=bid.expected_cost,
        ex_ante_emissions=bid.expected_emissions,
        imbalance_energy=imbalance,
        renewable_share=renshare,
        cost_breakdown=dict(result.cost_breakdown[0]),
        dispatch=dispatch,
        status=sol.status,
        gap=sol.gap,
        solve_time=sol.solve_time,
    )


# --- scheme comparison ----------------------------------------------------------


SCHEMES = ("custom", "tou", "custom_noflex")


def _strip_flexibility(sset: ScenarioSet, spec: HubSpec) -> ScenarioSet:
    scenarios = tuple(
        dataclasses.replace(
            s,
            workload=redistribute_flexible_uniform(
                s.workload, spec.datacenter, sset.grid
            ),
        )
        for s in sset.scenarios
    )
    return ScenarioSet(scenarios, sset.grid)


def evaluate_day(
    spec: HubSpec,
    scenarios: ScenarioSet,
    realized: RealizedDay,
    scheme: str = "custom",
    caps: DeratingProfile | None = None,
    options: SolveOptions | None = None,
) -> tuple[BidResult, DayOutcome]:
    """Plan one day under ``scheme``, then score it against the realized day."""
    if scheme not in SCHEMES:
        raise InputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    build_scheme = "tou" if scheme == "tou" else "custom"
    if scheme == "custom_noflex":
        scenarios = _strip_flexibility(scenarios, spec)
        realized = dataclasses.replace(
            realized,
            workload=redistribute_flexible_uniform(
                realized.workload, spec.datacenter, scenarios.grid
            ),
        )
    bid = plan_day(spec, scenarios, caps, options, scheme=build_scheme)
    outcome = expost_reoptimize(spec, bid, realized, options)
    outcome.scheme = scheme
    return bid, outcome


def evaluate_days(
    spec: HubSpec,
    scenarios_by_day: Sequence[ScenarioSet],
    realized_by_day: Sequence[RealizedDay],
    scheme: str = "custom",
    caps: DeratingProfile | None = None,
    options: SolveOptions | None = None,
    jobs: int = 1,
) -> EvaluationReport:
    """Evaluate many independent days, optionally in parallel."""
    if len(scenarios_by_day) != len(realized_by_day):
        raise InputError(
            f"{len(scenarios_by_day)} scenario sets vs "
            f"{len(realized_by_day)} realized days"
        )

    def one(pair):
        sset, realized = pair
        return evaluate_day(spec, sset, realized, scheme, caps, options)[1]

    pairs = list(zip(scenarios_by_day, realized_by_day))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(one, pairs))
    else:
        outcomes = [one(p) for p in pairs]
    return EvaluationReport.build(scheme, outcomes)


@dataclass
class SchemeComparison:
    reports: dict[str, EvaluationReport]
    deltas: dict[str, dict[str, float | None]]


def compare_schemes(
    spec: HubSpec,
    scenarios_by_day: Sequence[ScenarioSet],
    realized_by_day: Sequence[RealizedDay],
    schemes: Sequence[str] = ("custom", "tou"),
    caps: DeratingProfile | None = None,
    options: SolveOptions | None = None,
    jobs: int = 1,
) -> SchemeComparison:
    """Run the same days under several supply schemes and report deltas.

    Deltas are mean-metric changes relative to the first scheme, in percent.
    """
    for scheme in schemes:
        if scheme == "tou" and spec.economics.tou_tariff is None:
            raise InputError("economics.tou_tariff is required to compare 'tou'")
    reports = {
        scheme: evaluate_days(
            spec, scenarios_by_day, realized_by_day, scheme, caps, options, jobs
        )
        for scheme in schemes
    }
    baseline = reports[schemes[0]].summary
    deltas: dict[str, dict[str, float | None]] = {}
    for scheme in schemes[1:]:
        summary = reports[scheme].summary
        row: dict[str, float | None] = {}
        for metric in ("ex_post_cost", "ex_post_emissions"):
            base = baseline[metric]["mean"]
            if abs(base) < 1e-12:
                row[f"mean_{metric}_pct"] = None
            else:
                row[f"mean_{metric}_pct"] = (
                    100.0 * (summary[metric]["mean"] - base) / abs(base)
                )
        deltas[scheme] = row
    return SchemeComparison(reports, deltas)


# --- serialization ------------------------------------------------------------------


def outcome_row(o: DayOutcome) -> str:
    return (
        f"{o.date},{o.scheme},{float(o.ex_post_cost)!r},"
        f"{float(o.ex_post_emissions)!r},{float(o.imbalance_energy)!r},"
        f"{float(o.renewable_share)!r}"
    )


def write_outcomes_csv(outcomes: Sequence[DayOutcome], path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("date,scheme,cost_eur,emissions_kg,imbalance_kwh,renshare\n")
        for o in outcomes:
            fh.write(outcome_row(o) + "\n")


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scheme": report.scheme,
        "summary": report.summary,
        "days": [
            {
                "date": o.date,
                "scheme": o.scheme,
                "ex_post_cost": float(o.ex_post_cost),
                "ex_post_emissions": float(o.ex_post_emissions),
                "ex_ante_cost": float(o.ex_ante_cost),
                "ex_ante_emissions": float(o.ex_ante_emissions),
                "imbalance_energy": float(o.imbalance_energy),
                "renewable_share": float(o.renewable_share),
                "cost_breakdown": {k: float(v) for k, v in o.cost_breakdown.items()},
                "status": o.status,
            }
            for o in report.outcomes
        ],
    }


def comparison_to_dict(cmp: SchemeComparison) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "schemes": {name: report_to_dict(rep) for name, rep in cmp.reports.items()},
        "deltas": cmp.deltas,
    }
