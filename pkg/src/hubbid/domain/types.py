"""Core data types for the energy-hub bidding engine.

Unit conventions, fixed repo-wide: power kW, heat kW_th, energy kWh,
prices EUR/kWh, carbon intensity kgCO2eq/kWh, carbon price EUR/kgCO2eq.
A carbon price of 265 EUR per tonne is therefore stored as 0.265.

All types are immutable after construction (frozen dataclasses; series are
read-only float arrays), so instances are safe to share across threads.
Constructors only coerce shapes -- they do not enforce domain invariants,
which is the job of :func:`hubbid.domain.validation.validate_hub_spec`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping, Sequence

import numpy as np

COMPUTE_RESOURCES = ("CPU", "GPU")
MEMORY_RESOURCES = ("MEM-CPU", "MEM-GPU")
ALL_RESOURCES = COMPUTE_RESOURCES + MEMORY_RESOURCES

#: memory resource -> the compute resource whose usage drives it
MEMORY_PARTNER = {"MEM-CPU": "CPU", "MEM-GPU": "GPU"}


def readonly_series(values) -> np.ndarray:
    """Copy ``values`` into a read-only float array."""
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _freeze_map_of_series(mapping: Mapping) -> dict:
    return {k: readonly_series(v) for k, v in mapping.items()}


@dataclass(frozen=True)
class TimeGrid:
    """Uniform daily planning grid.

    ``step_hours`` is the step length in hours, ``steps_per_day`` the number
    of steps; their product must be 24. ``start`` is the timestamp of the
    first step (UTC).
    """

    step_hours: float
    steps_per_day: int
    start: datetime = field(
        default_factory=lambda: datetime(2025, 1, 1, tzinfo=timezone.utc)
    )

    @property
    def hours(self) -> np.ndarray:
        return np.arange(self.steps_per_day) * self.step_hours


@dataclass(frozen=True)
class ClusterSpec:
    """One homogeneous machine cluster.

    ``capacity`` maps resource name -> installed units; ``rho_intercept`` and
    ``rho_coeff`` are the affine usage-to-IT-power model (kW and kW/unit);
    ``mem_ratio`` maps each memory resource to its historical memory/compute
    usage ratio; ``rec_efficiency``/``rec_idle`` describe heat recovery from
    the liquid-cooled resources listed in ``cooled_resources``.
    """

    id: str
    capacity: Mapping[str, float]
    rho_intercept: float
    rho_coeff: Mapping[str, float]
    mem_ratio: Mapping[str, float]
    rec_efficiency: float = 0.0
    rec_idle: float = 0.0
    cooled_resources: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "capacity", dict(self.capacity))
        object.__setattr__(self, "rho_coeff", dict(self.rho_coeff))
        object.__setattr__(self, "mem_ratio", dict(self.mem_ratio))
        object.__setattr__(self, "cooled_resources", tuple(self.cooled_resources))

    def compute_resources(self) -> tuple[str, ...]:
        """Compute resources this cluster actually hosts (capacity > 0)."""
        return tuple(r for r in COMPUTE_RESOURCES if self.capacity.get(r, 0.0) > 0)


@dataclass(frozen=True)
class DataCenterSpec:
    clusters: tuple[ClusterSpec, ...]
    pue: float
    gamma_inelastic: float = 1.0
    gamma_flexible: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))

    def cluster(self, cluster_id: str) -> ClusterSpec:
        for c in self.clusters:
            if c.id == cluster_id:
                return c
        raise KeyError(cluster_id)


@dataclass(frozen=True)
class BessSpec:
    """Battery storage described by a bucket model plus throughput aging."""

    e_min: float
    e_max: float
    e_rated: float
    p_rated: float
    eta_oneway: float
    e_init: float
    rated_cycles: float
    investment_cost: float = 0.0
    lca_emissions: float = 0.0


@dataclass(frozen=True)
class PvSpec:
    p_rated: float
    ghi_ref: float = 1000.0


@dataclass(frozen=True)
class OrcCurve:
    """Sampled heat-to-power curve, as ordered (heat_kw, power_kw) pairs.

    The first sample must be (0, 0); heat values strictly increase; power is
    non-decreasing and never exceeds heat.
    """

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "samples", tuple((float(q), float(p)) for q, p in self.samples)
        )

    @property
    def heat_kw(self) -> np.ndarray:
        return readonly_series([q for q, _ in self.samples])

    @property
    def power_kw(self) -> np.ndarray:
        return readonly_series([p for _, p in self.samples])

    @property
    def n_segments(self) -> int:
        return len(self.samples) - 1

    def power_bound(self, heat_in: float) -> float:
        """Piecewise-linear interpolation of the max power at ``heat_in``."""
        return float(np.interp(heat_in, self.heat_kw, self.power_kw))


@dataclass(frozen=True)
class PpaContract:
    """Grid-connection contract: rated/minimum transfer capacity and the
    daily/weekly budgets limiting cumulative connection de-rating."""

    p_gcp_rated: float
    p_gcp_min: float
    t_daily_lim: float
    t_weekly_lim: float


@dataclass(frozen=True)
class DeratingProfile:
    """Per-step transfer-capacity caps (kW) over one day or a whole number of days."""

    cap: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "cap", readonly_series(self.cap))

    def __len__(self) -> int:
        return len(self.cap)

    @classmethod
    def flat(cls, level: float, steps: int) -> "DeratingProfile":
        return cls(np.full(steps, float(level)))


@dataclass(frozen=True)
class EconomicsSpec:
    """Prices, targets and risk preferences.

    ``cvar_alpha`` is the tail confidence level, ``cvar_beta`` the weight on
    the tail-risk term (0 = risk-neutral). ``renewable_target`` is the
    minimum renewable share, with violations tolerated in at most a
    ``renewable_alpha`` fraction of scenarios. ``tou_tariff`` is an optional
    per-step EUR/kWh series used by the fixed-tariff supply scheme.
    """

    carbon_price: float
    heat_price: float
    renewable_target: float = 0.0
    renewable_alpha: float = 1.0
    cvar_alpha: float = 0.95
    cvar_beta: float = 0.0
    tou_tariff: np.ndarray | None = None

    def __post_init__(self):
        if self.tou_tariff is not None:
            object.__setattr__(self, "tou_tariff", readonly_series(self.tou_tariff))


@dataclass(frozen=True)
class ExogenousScenario:
    """One scenario of everything outside the operator's control."""

    spot: np.ndarray
    price_short: np.ndarray
    price_long: np.ndarray
    carbon_intensity: np.ndarray
    renewable_share: np.ndarray
    ghi: np.ndarray
    heat_demand: np.ndarray

    def __post_init__(self):
        for name in (
            "spot",
            "price_short",
            "price_long",
            "carbon_intensity",
            "renewable_share",
            "ghi",
            "heat_demand",
        ):
            object.__setattr__(self, name, readonly_series(getattr(self, name)))


@dataclass(frozen=True)
class WorkloadScenario:
    """Inelastic per-step usage series and flexible daily totals.

    ``inelastic`` maps (cluster_id, resource) -> per-step usage (resource
    units); ``flexible`` maps (cluster_id, resource) -> daily total demand in
    resource-hours. Flexible keys are restricted to compute resources;
    memory follows compute through the cluster ratios.
    """

    inelastic: Mapping[tuple[str, str], np.ndarray]
    flexible: Mapping[tuple[str, str], float]

    def __post_init__(self):
        object.__setattr__(self, "inelastic", _freeze_map_of_series(self.inelastic))
        object.__setattr__(
            self, "flexible", {k: float(v) for k, v in self.flexible.items()}
        )


@dataclass(frozen=True)
class Scenario:
    exogenous: ExogenousScenario
    workload: WorkloadScenario
    probability: float


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: tuple[Scenario, ...]
    grid: TimeGrid

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    def __len__(self) -> int:
        return len(self.scenarios)

    @property
    def probabilities(self) -> np.ndarray:
        return readonly_series([s.probability for s in self.scenarios])

    @classmethod
    def single(
        cls,
        exogenous: ExogenousScenario,
        workload: WorkloadScenario,
        grid: TimeGrid,
    ) -> "ScenarioSet":
        """A degenerate set holding one scenario with probability 1."""
        return cls((Scenario(exogenous, workload, 1.0),), grid)


@dataclass(frozen=True)
class HubSpec:
    """Static description of the whole hub. DER fields are None when absent."""

    datacenter: DataCenterSpec
    ppa: PpaContract
    economics: EconomicsSpec
    bess: BessSpec | None = None
    pv: PvSpec | None = None
    orc: OrcCurve | None = None


@dataclass(frozen=True)
class RealizedDay:
    """Realized exogenous values and workload for one delivery day."""

    exogenous: ExogenousScenario
    workload: WorkloadScenario
    date: str = ""
