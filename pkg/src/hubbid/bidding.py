"""Planning orchestration: build, solve, extract the bid and the VCCs.

``plan_day`` is the single entry point for one planning day. It validates
inputs, assembles the MILP, solves it with the configured backend, replays
the solution through the independent checker, and extracts the day-ahead
profile, the virtual capacity curves and the cost/emission breakdown. On an
infeasible model it retries with chance-constraint quotas relaxed one family
at a time to report which relaxation restores feasibility.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .domain.types import (
    COMPUTE_RESOURCES,
    DeratingProfile,
    HubSpec,
    ScenarioSet,
    readonly_series,
)
from .domain.validation import validate_derating, validate_hub_spec
from .errors import (
    BackendError,
    InputError,
    PlanningInfeasibleError,
    SolutionIntegrityError,
)
from .model.builder import (
    COST_CATEGORIES,
    HubModelBuilder,
    build_hub_model,
    cluster_resources,
)
from .solver.backends import solve
from .solver.checker import check_solution, solution_invariants
from .solver.options import INFEASIBLE, UNBOUNDED, Solution, SolveOptions

BID_SCHEMA_VERSION = 1

_FEAS_TOL = 1e-6


@dataclass
class BidResult:
    """Everything extracted from one solved planning day."""

    scheme: str
    step_hours: float
    day_ahead: np.ndarray | None
    caps: np.ndarray
    vcc: dict[tuple[str, str], np.ndarray]
    per_scenario_dispatch: list[dict]
    cost_breakdown: list[dict[str, float]]
    scenario_costs: np.ndarray
    scenario_emissions: np.ndarray
    probabilities: np.ndarray
    expected_cost: float
    cvar: float
    expected_emissions: float
    objective: float
    status: str
    gap: float | None
    solve_time: float = 0.0
    relaxed_quotas: tuple[str, ...] = ()

    @property
    def steps_per_day(self) -> int:
        return len(self.caps)


def discrete_cvar(costs: Sequence[float], probs: Sequence[float], alpha: float) -> float:
    """CVaR of a discrete cost distribution at confidence level ``alpha``.

    Computed at the optimal threshold (the alpha-quantile), which is what
    the linearized tail term attains at an optimum.
    """
    costs = np.asarray(costs, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if not 0.0 <= alpha < 1.0:
        raise InputError(f"alpha must be in [0, 1), got {alpha}")
    order = np.argsort(costs, kind="stable")
    cum = 0.0
    zeta = float(costs[order[-1]])
    for i in order:
        cum += probs[i]
        if cum >= alpha - 1e-12:
            zeta = float(costs[i])
            break
    tail = np.maximum(costs - zeta, 0.0)
    return zeta + float(np.dot(probs, tail)) / (1.0 - alpha)


def extract_vcc(
    dispatch: Sequence[Mapping], quantile: float | None = None
) -> dict[tuple[str, str], np.ndarray]:
    """Per-step virtual capacity curves from per-scenario usage.

    Default is the conservative rule (maximum usage across scenarios); pass
    ``quantile`` in (0, 1] for a less conservative curve tuned to the
    real-time layer.
    """
    if not dispatch:
        raise InputError("dispatch is empty")
    keys = dispatch[0]["u"].keys()
    out: dict[tuple[str, str], np.ndarray] = {}
    for key in keys:
        stack = np.stack([np.asarray(d["u"][key], dtype=float) for d in dispatch])
        if quantile is None:
            out[key] = stack.max(axis=0)
        else:
            if not 0.0 < quantile <= 1.0:
                raise InputError(f"quantile must be in (0, 1], got {quantile}")
            out[key] = np.quantile(stack, quantile, axis=0)
    return out


def _values_by_id(builder: HubModelBuilder, values: Mapping[str, float]) -> dict[int, float]:
    return {
        vid: float(values[v.name]) for vid, v in enumerate(builder.model.variables)
    }


def _series(builder, values, family: dict, w: int, length: int, offset: int = 0):
    model = builder.model
    return np.array(
        [values[model.variables[family[w, t + offset]].name] for t in range(length)]
    )


def _extract_dispatch(builder: HubModelBuilder, values: Mapping[str, float]) -> list[dict]:
    spec, ix = builder.spec, builder.ix
    n_t = builder.n_t
    out = []
    for w in range(builder.n_w):
        usage = {}
        for cluster in spec.datacenter.clusters:
            for res in cluster_resources(cluster):
                usage[(cluster.id, res)] = np.array(
                    [
                        values[builder.model.variables[ix.u[w, t, cluster.id, res]].name]
                        for t in range(n_t)
                    ]
                )
        d: dict = {
            "u": usage,
            "p_dc": _series(builder, values, ix.p_dc, w, n_t),
            "q_rec": _series(builder, values, ix.q_rec, w, n_t),
            "q_orc_in": _series(builder, values, ix.q_orc_in, w, n_t),
            "q_sold": _series(builder, values, ix.q_sold, w, n_t),
            "q_lost": _series(builder, values, ix.q_lost, w, n_t),
            "p_gcp": _series(builder, values, ix.p_gcp, w, n_t),
            "e_nonren": _series(builder, values, ix.e_nonren, w, n_t, offset=1),
        }
        if spec.orc is not None:
            d["p_orc"] = _series(builder, values, ix.p_orc, w, n_t)
        if spec.bess is not None:
            d["p_bess_c"] = _series(builder, values, ix.p_bess_c, w, n_t)
            d["p_bess_d"] = _series(builder, values, ix.p_bess_d, w, n_t)
            d["p_bess_ac"] = _series(builder, values, ix.p_bess_ac, w, n_t)
            d["e_bess"] = np.concatenate(
                (
                    [spec.bess.e_init],
                    _series(builder, values, ix.e_bess, w, n_t, offset=1),
                )
            )
            d["aging"] = _series(builder, values, ix.a_bess, w, n_t)
        if spec.pv is not None:
            d["p_pv"] = _series(builder, values, ix.p_pv, w, n_t)
        if ix.p_imb:
            d["p_imb"] = _series(builder, values, ix.p_imb, w, n_t)
            d["p_plus"] = _series(builder, values, ix.p_plus, w, n_t)
            d["p_minus"] = _series(builder, values, ix.p_minus, w, n_t)
        out.append(d)
    return out


def extract_bid(builder: HubModelBuilder, sol: Solution) -> BidResult:
    """Turn a checked solution into a BidResult."""
    values = sol.values
    ids = _values_by_id(builder, values)
    probs = builder.sset.probabilities

    breakdown = []
    costs = np.empty(builder.n_w)
    emissions = np.empty(builder.n_w)
    for w in range(builder.n_w):
        cats = {cat: builder.cost[w][cat].value(ids) for cat in COST_CATEGORIES}
        breakdown.append(cats)
        costs[w] = sum(cats.values())
        emissions[w] = builder.emissions[w].value(ids)

    expected_cost = float(np.dot(probs, costs))
    econ = builder.spec.economics
    cvar = discrete_cvar(costs, probs, econ.cvar_alpha)
    day_ahead = None
    if builder.ix.p_da:
        day_ahead = np.array(
            [
                values[builder.model.variables[builder.ix.p_da[t]].name]
                for t in range(builder.n_t)
            ]
        )
    dispatch = _extract_dispatch(builder, values)
    return BidResult(
        scheme="custom" if builder.ix.p_da else "tou",
        step_hours=builder.dt,
        day_ahead=day_ahead,
        caps=np.asarray(builder.caps.cap, dtype=float).copy(),
        vcc=extract_vcc(dispatch),
        per_scenario_dispatch=dispatch,
        cost_breakdown=breakdown,
        scenario_costs=costs,
        scenario_emissions=emissions,
        probabilities=np.asarray(probs, dtype=float).copy(),
        expected_cost=expected_cost,
        cvar=cvar,
        expected_emissions=float(np.dot(probs, emissions)),
        objective=sol.objective,
        status=sol.status,
        gap=sol.gap,
        solve_time=sol.solve_time,
    )


def _relaxed(spec: HubSpec, families: tuple[str, ...]) -> HubSpec:
    econ = spec.economics
    dc = spec.datacenter
    if "renewable" in families:
        econ = dataclasses.replace(econ, renewable_alpha=1.0)
    if "flexible" in families:
        dc = dataclasses.replace(dc, gamma_flexible=0.0)
    if "inelastic" in families:
        dc = dataclasses.replace(dc, gamma_inelastic=0.0)
    return dataclasses.replace(spec, economics=econ, datacenter=dc)


_TRIAGE = (
    ("renewable",),
    ("renewable", "flexible"),
    ("renewable", "flexible", "inelastic"),
)


def _triage_infeasibility(
    spec: HubSpec,
    scenarios: ScenarioSet,
    caps: DeratingProfile | None,
    scheme: str,
    options: SolveOptions,
) -> str:
    for families in _TRIAGE:
        relaxed = build_hub_model(
            _relaxed(spec, families),
            scenarios,
            caps,
            scheme=scheme,
            native_sos2=options.native_sos2,
        )
        sol = solve(relaxed.model, options)
        if sol.status not in (INFEASIBLE, UNBOUNDED):
            return (
                f"relaxing the {families[-1]} chance-constraint quota restores "
                f"feasibility (relaxed: {', '.join(families)})"
            )
    return (
        "infeasible even with all chance-constraint quotas relaxed; check "
        "capacities, the cap profile and the demand data"
    )


def plan_day(
    spec: HubSpec,
    scenarios: ScenarioSet,
    caps: DeratingProfile | None = None,
    options: SolveOptions | None = None,
    scheme: str = "custom",
    vcc_quantile: float | None = None,
) -> BidResult:
    """Plan one day: validate, build, solve, verify, extract.

    Raises InputError on bad specs or caps, PlanningInfeasibleError with a
    triage hint when the model has no feasible point, and
    SolutionIntegrityError if the returned incumbent fails the independent
    checks.
    """
    options = options or SolveOptions()
    report = validate_hub_spec(spec)
    if not report.ok:
        raise InputError("invalid hub spec: " + "; ".join(report.violations))
    if caps is not None:
        verdict = validate_derating(caps, spec.ppa, scenarios.grid)
        if not verdict.passed:
            problems = []
            if not verdict.min_capacity_ok:
                problems.append(f"caps below contract minimum at steps {verdict.violating_steps}")
            if not verdict.within_rated_ok:
                problems.append(f"caps above rated capacity at steps {verdict.violating_steps}")
            if not verdict.daily_ok:
                problems.append("daily de-rating energy budget exceeded")
            if not verdict.weekly_ok:
                problems.append("weekly de-rating energy budget exceeded")
            raise InputError("cap profile fails de-rating rules: " + "; ".join(problems))

    builder = build_hub_model(
        spec, scenarios, caps, scheme=scheme, native_sos2=options.native_sos2
    )
    sol = solve(builder.model, options)
    if sol.status == INFEASIBLE:
        hint = _triage_infeasibility(spec, scenarios, caps, scheme, options)
        raise PlanningInfeasibleError("planning model is infeasible", hint=hint)
    if sol.status == UNBOUNDED:
        raise BackendError("planning model is unbounded; check prices and bounds")
    if not sol.ok:
        raise BackendError(f"solver returned no usable solution (status {sol.status})")

    violations = check_solution(builder.model, sol.values)
    violations += solution_invariants(builder, sol.values)
    if violations:
        raise SolutionIntegrityError(
            f"{len(violations)} integrity violations, first: {violations[0]}"
        )

    bid = extract_bid(builder, sol)
    if vcc_quantile is not None:
        bid.vcc = extract_vcc(bid.per_scenario_dispatch, vcc_quantile)
    if bid.day_ahead is not None:
        excess = bid.day_ahead - bid.caps
        if np.any(excess > _FEAS_TOL):
            t = int(np.argmax(excess))
            raise SolutionIntegrityError(
                f"day-ahead bid {bid.day_ahead[t]} above cap {bid.caps[t]} at step {t}"
            )
    return bid


# --- serialization -----------------------------------------------------------------


def _dispatch_to_lists(dispatch: list[dict]) -> list[dict]:
    out = []
    for d in dispatch:
        entry: dict = {
            "u": [
                {"cluster": c, "resource": r, "series": list(map(float, arr))}
                for (c, r), arr in d["u"].items()
            ]
        }
        for key, value in d.items():
            if key == "u":
                continue
            entry[key] = list(map(float, value))
        out.append(entry)
    return out


def _dispatch_from_lists(raw: list[dict]) -> list[dict]:
    out = []
    for d in raw:
        entry: dict = {
            "u": {
                (item["cluster"], item["resource"]): np.asarray(
                    item["series"], dtype=float
                )
                for item in d["u"]
            }
        }
        for key, value in d.items():
            if key == "u":
                continue
            entry[key] = np.asarray(value, dtype=float)
        out.append(entry)
    return out


def bid_to_dict(bid: BidResult, include_dispatch: bool = True) -> dict:
    doc = {
        "schema_version": BID_SCHEMA_VERSION,
        "scheme": bid.scheme,
        "step_hours": bid.step_hours,
        "status": bid.status,
        "gap": bid.gap,
        "objective": bid.objective,
        "expected_cost": bid.expected_cost,
        "cvar": bid.cvar,
        "expected_emissions": bid.expected_emissions,
        "day_ahead": None if bid.day_ahead is None else list(map(float, bid.day_ahead)),
        "caps": list(map(float, bid.caps)),
        "probabilities": list(map(float, bid.probabilities)),
        "scenario_costs": list(map(float, bid.scenario_costs)),
        "scenario_emissions": list(map(float, bid.scenario_emissions)),
        "cost_breakdown": [
            {k: float(v) for k, v in cats.items()} for cats in bid.cost_breakdown
        ],
        "vcc": [
            {"cluster": c, "resource": r, "series": list(map(float, arr))}
            for (c, r), arr in bid.vcc.items()
        ],
        "relaxed_quotas": list(bid.relaxed_quotas),
    }
    if include_dispatch:
        doc["per_scenario_dispatch"] = _dispatch_to_lists(bid.per_scenario_dispatch)
    return doc


def bid_from_dict(doc: Mapping) -> BidResult:
    try:
        version = doc["schema_version"]
        if version != BID_SCHEMA_VERSION:
            raise InputError(f"schema_version: expected {BID_SCHEMA_VERSION}, got {version}")
        day_ahead = doc["day_ahead"]
        return BidResult(
            scheme=doc["scheme"],
            step_hours=float(doc["step_hours"]),
            day_ahead=None if day_ahead is None else np.asarray(day_ahead, dtype=float),
            caps=np.asarray(doc["caps"], dtype=float),
            vcc={
                (item["cluster"], item["resource"]): np.asarray(
                    item["series"], dtype=float
                )
                for item in doc["vcc"]
            },
            per_scenario_dispatch=_dispatch_from_lists(
                doc.get("per_scenario_dispatch", [])
            ),
            cost_breakdown=[dict(cats) for cats in doc["cost_breakdown"]],
            scenario_costs=np.asarray(doc["scenario_costs"], dtype=float),
            scenario_emissions=np.asarray(doc["scenario_emissions"], dtype=float),
            probabilities=np.asarray(doc["probabilities"], dtype=float),
            expected_cost=float(doc["expected_cost"]),
            cvar=float(doc["cvar"]),
            expected_emissions=float(doc["expected_emissions"]),
            objective=float(doc["objective"]),
            status=doc["status"],
            gap=None if doc["gap"] is None else float(doc["gap"]),
            relaxed_quotas=tuple(doc.get("relaxed_quotas", ())),
        )
    except KeyError as exc:
        raise InputError(f"bid document is missing field {exc.args[0]!r}") from exc


def save_bid(bid: BidResult, path, include_dispatch: bool = True) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(bid_to_dict(bid, include_dispatch), fh, indent=2)
        fh.write("\n")


def load_bid(path) -> BidResult:
    with open(path) as fh:
        return bid_from_dict(json.load(fh))


def write_bid_csv(bid: BidResult, path) -> None:
    """Flat submission file: one row per step."""
    if bid.day_ahead is None:
        raise InputError("tariff-scheme results carry no day-ahead bid")
    with open(path, "w", newline="\n") as fh:
        fh.write("step,day_ahead_kw\n")
        for t, value in enumerate(bid.day_ahead):
            fh.write(f"{t},{float(value)!r}\n")


def write_vcc_csv(bid: BidResult, cluster_id: str, path) -> None:
    """Per-cluster VCC file: one column per hosted resource."""
    resources = [res for (c, res) in bid.vcc if c == cluster_id]
    if not resources:
        raise InputError(f"no VCC entries for cluster {cluster_id!r}")
    resources.sort(key=lambda r: (r not in COMPUTE_RESOURCES, r))
    with open(path, "w", newline="\n") as fh:
        fh.write("step," + ",".join(resources) + "\n")
        steps = len(bid.vcc[(cluster_id, resources[0])])
        for t in range(steps):
            row = ",".join(repr(float(bid.vcc[(cluster_id, res)][t])) for res in resources)
            fh.write(f"{t},{row}\n")
