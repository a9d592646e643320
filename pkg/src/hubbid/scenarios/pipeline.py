"""End-to-end scenario construction: bootstrap, combine, reduce."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..domain.types import (
    COMPUTE_RESOURCES,
    DataCenterSpec,
    ExogenousScenario,
    Scenario,
    ScenarioSet,
    TimeGrid,
    WorkloadScenario,
)
from ..errors import InputError
from .combine import ComboSet, combine_scenarios
from .imbalance import ImbalanceFactors
from .reduce import reduce_kmeans
from .residuals import ResidualHistory, bootstrap_scenarios

# exogenous parameter groups in their fixed concatenation order
EXOGENOUS_PARAMS = ("spot", "renewable_share", "carbon_intensity", "ghi")

_DOMAINS: dict[str, tuple[float | None, float | None]] = {
    "spot": (None, None),
    "renewable_share": (0.0, 1.0),
    "carbon_intensity": (0.0, None),
    "ghi": (0.0, None),
}


@dataclass(frozen=True)
class ScenarioInputs:
    """Point forecasts and residual histories feeding scenario generation.

    ``forecasts`` maps each exogenous parameter (spot, renewable_share,
    carbon_intensity, ghi) to its per-step point forecast; ``residuals`` maps
    the same keys to residual histories. Inelastic workload forecasts are
    per-step series per (cluster, compute resource); flexible forecasts are
    daily totals in resource-hours with length-1 residual rows.
    ``heat_demand`` is treated as deterministic.
    """

    grid: TimeGrid
    forecasts: Mapping[str, np.ndarray]
    residuals: Mapping[str, ResidualHistory]
    inelastic_forecasts: Mapping[tuple[str, str], np.ndarray]
    inelastic_residuals: Mapping[tuple[str, str], ResidualHistory]
    imbalance: ImbalanceFactors
    heat_demand: np.ndarray
    flexible_forecasts: Mapping[tuple[str, str], float] = field(default_factory=dict)
    flexible_residuals: Mapping[tuple[str, str], ResidualHistory] = field(default_factory=dict)


def _workload_keys(dc: DataCenterSpec, keys) -> list[tuple[str, str]]:
    """Order (cluster, resource) keys by cluster declaration then CPU, GPU."""
    order = {c.id: i for i, c in enumerate(dc.clusters)}
    for cluster_id, res in keys:
        if cluster_id not in order:
            raise InputError(f"workload forecast for unknown cluster {cluster_id!r}")
        if res not in COMPUTE_RESOURCES:
            raise InputError(
                f"workload forecast for ({cluster_id}, {res}): only compute "
                f"resources may carry demand"
            )
    return sorted(keys, key=lambda k: (order[k[0]], COMPUTE_RESOURCES.index(k[1])))


def build_parameter_pools(
    inputs: ScenarioInputs, dc: DataCenterSpec, n_per_param: int, seed: int
) -> dict[str, np.ndarray]:
    """Bootstrap every stochastic parameter group independently.

    Returns an insertion-ordered map parameter name -> (n_per_param, len)
    array, in the fixed concatenation order: spot, renewable share, carbon
    intensity, GHI, then inelastic and flexible demand per cluster/resource.
    Workload parameters are clamped to [0, capacity] and [0, inf).
    """
    for name in EXOGENOUS_PARAMS:
        if name not in inputs.forecasts:
            raise InputError(f"missing forecast for parameter {name!r}")
        if name not in inputs.residuals:
            raise InputError(f"missing residual history for parameter {name!r}")

    seeds = np.random.SeedSequence(seed).spawn(
        len(EXOGENOUS_PARAMS) + len(inputs.inelastic_forecasts) + len(inputs.flexible_forecasts)
    )
    seed_iter = iter(seeds)

    pools: dict[str, np.ndarray] = {}
    for name in EXOGENOUS_PARAMS:
        pools[name] = bootstrap_scenarios(
            inputs.forecasts[name],
            inputs.residuals[name],
            n_per_param,
            next(seed_iter),
            domain=_DOMAINS[name],
        )

    for cluster_id, res in _workload_keys(dc, inputs.inelastic_forecasts):
        history = inputs.inelastic_residuals.get((cluster_id, res))
        if history is None:
            raise InputError(f"missing inelastic residuals for ({cluster_id}, {res})")
        cap = dc.cluster(cluster_id).capacity.get(res, 0.0)
        pools[f"inelastic/{cluster_id}/{res}"] = bootstrap_scenarios(
            inputs.inelastic_forecasts[cluster_id, res],
            history,
            n_per_param,
            next(seed_iter),
            domain=(0.0, cap),
        )

    for cluster_id, res in _workload_keys(dc, inputs.flexible_forecasts):
        history = inputs.flexible_residuals.get((cluster_id, res))
        if history is None:
            raise InputError(f"missing flexible residuals for ({cluster_id}, {res})")
        pools[f"flexible/{cluster_id}/{res}"] = bootstrap_scenarios(
            [inputs.flexible_forecasts[cluster_id, res]],
            history,
            n_per_param,
            next(seed_iter),
            domain=(0.0, None),
        )
    return pools


def combos_to_scenario(
    vector: np.ndarray,
    combos: ComboSet,
    inputs: ScenarioInputs,
    probability: float,
) -> Scenario:
    """Cut one flat combination vector back into a weighted scenario."""
    spot = vector[combos.slice_of("spot")]
    exogenous = ExogenousScenario(
        spot=spot,
        price_short=inputs.imbalance.k_short * spot,
        price_long=inputs.imbalance.k_long * spot,
        carbon_intensity=vector[combos.slice_of("carbon_intensity")],
        renewable_share=vector[combos.slice_of("renewable_share")],
        ghi=vector[combos.slice_of("ghi")],
        heat_demand=inputs.heat_demand,
    )
    inelastic = {}
    for key in inputs.inelastic_forecasts:
        cluster_id, res = key
        inelastic[key] = vector[combos.slice_of(f"inelastic/{cluster_id}/{res}")]
    flexible = {}
    for key in inputs.flexible_forecasts:
        cluster_id, res = key
        flexible[key] = float(vector[combos.slice_of(f"flexible/{cluster_id}/{res}")][0])
    return Scenario(
        exogenous=exogenous,
        workload=WorkloadScenario(inelastic=inelastic, flexible=flexible),
        probability=probability,
    )


def generate_scenario_set(
    inputs: ScenarioInputs,
    dc: DataCenterSpec,
    n_per_param: int,
    n_combos: int,
    k: int,
    seed: int,
) -> ScenarioSet:
    """Construct the weighted scenario set for one delivery day.

    Bootstraps ``n_per_param`` scenarios per stochastic parameter, draws
    ``n_combos`` independent combinations, and reduces them to ``k``
    weighted representatives. Fully deterministic for a fixed seed.
    """
    pools = build_parameter_pools(inputs, dc, n_per_param, seed)
    combos = combine_scenarios(pools, n_combos, seed + 1)
    reduced = reduce_kmeans(combos.vectors, k, seed + 2)
    scenarios = tuple(
        combos_to_scenario(reduced.vectors[i], combos, inputs, float(reduced.probabilities[i]))
        for i in range(len(reduced.probabilities))
    )
    return ScenarioSet(scenarios=scenarios, grid=inputs.grid)
