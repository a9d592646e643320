"""Input validation: hub specifications and de-rating request profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from .types import (
    ALL_RESOURCES,
    COMPUTE_RESOURCES,
    MEMORY_RESOURCES,
    DeratingProfile,
    HubSpec,
    PpaContract,
    TimeGrid,
)


@dataclass
class ValidationReport:
    """Report-style validation outcome: a list of violated invariants."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __iter__(self):
        return iter(self.violations)


def validate_time_grid(grid: TimeGrid, report: ValidationReport | None = None) -> ValidationReport:
    report = report if report is not None else ValidationReport()
    if grid.step_hours <= 0:
        report.add("grid: step_hours > 0 violated")
    if grid.steps_per_day < 1:
        report.add("grid: steps_per_day >= 1 violated")
    elif abs(grid.steps_per_day * grid.step_hours - 24.0) > 1e-9:
        report.add("grid: steps_per_day * step_hours = 24 violated")
    return report


def validate_hub_spec(spec: HubSpec) -> ValidationReport:
    """Check every static invariant of a hub description.

    Never raises and never mutates: the result lists each violated
    invariant as a human-readable string (empty list means valid).
    """
    r = ValidationReport()

    dc = spec.datacenter
    if dc.pue < 1.0:
        r.add("datacenter: pue >= 1 violated")
    for name, g in (("gamma_inelastic", dc.gamma_inelastic), ("gamma_flexible", dc.gamma_flexible)):
        if not 0.0 <= g <= 1.0:
            r.add(f"datacenter: 0 <= {name} <= 1 violated")
    ids = [c.id for c in dc.clusters]
    if len(set(ids)) != len(ids):
        r.add("datacenter: cluster ids unique violated")
    if not dc.clusters:
        r.add("datacenter: at least one cluster required")

    for c in dc.clusters:
        tag = f"cluster {c.id}"
        for res, cap in c.capacity.items():
            if res not in ALL_RESOURCES:
                r.add(f"{tag}: unknown resource {res!r} in capacity")
            if cap < 0:
                r.add(f"{tag}: capacity[{res}] >= 0 violated")
        if not 0.0 <= c.rec_efficiency <= 1.0:
            r.add(f"{tag}: 0 <= rec_efficiency <= 1 violated")
        for res, coeff in c.rho_coeff.items():
            if coeff < 0:
                r.add(f"{tag}: rho_coeff[{res}] >= 0 violated")
        if set(c.mem_ratio) - set(MEMORY_RESOURCES):
            r.add(f"{tag}: mem_ratio keys must be exactly {MEMORY_RESOURCES}")
        for res in c.cooled_resources:
            if res not in COMPUTE_RESOURCES:
                r.add(f"{tag}: cooled resource {res!r} must be a compute resource")

    if spec.bess is not None:
        b = spec.bess
        if not (0.0 <= b.e_min <= b.e_init <= b.e_max <= b.e_rated):
            if b.e_min > b.e_max:
                r.add("bess: e_min <= e_max violated")
            if not (b.e_min <= b.e_init <= b.e_max):
                r.add("bess: e_min <= e_init <= e_max violated")
            if b.e_max > b.e_rated:
                r.add("bess: e_max <= e_rated violated")
            if b.e_min < 0:
                r.add("bess: e_min >= 0 violated")
        if not 0.0 < b.eta_oneway <= 1.0:
            r.add("bess: 0 < eta_oneway <= 1 violated")
        if b.p_rated <= 0:
            r.add("bess: p_rated > 0 violated")
        if b.rated_cycles <= 0:
            r.add("bess: rated_cycles > 0 violated")

    if spec.pv is not None:
        if spec.pv.p_rated < 0:
            r.add("pv: p_rated >= 0 violated")
        if spec.pv.ghi_ref <= 0:
            r.add("pv: ghi_ref > 0 violated")

    if spec.orc is not None:
        samples = spec.orc.samples
        if len(samples) < 2:
            r.add("orc: at least two samples required")
        if samples and samples[0] != (0.0, 0.0):
            r.add("orc: samples[0] = (0, 0) violated")
        heat = [q for q, _ in samples]
        power = [p for _, p in samples]
        if any(b <= a for a, b in zip(heat, heat[1:])):
            r.add("orc: heat_kw strictly increasing violated")
        if any(b < a for a, b in zip(power, power[1:])):
            r.add("orc: power_kw non-decreasing violated")
        if any(p > q for q, p in samples):
            r.add("orc: power_kw <= heat_kw violated")

    ppa = spec.ppa
    if not 0.0 <= ppa.p_gcp_min <= ppa.p_gcp_rated:
        r.add("ppa: 0 <= p_gcp_min <= p_gcp_rated violated")
    if not 0.0 <= ppa.t_daily_lim <= 24.0:
        r.add("ppa: 0 <= t_daily_lim <= 24 violated")
    if not ppa.t_daily_lim <= ppa.t_weekly_lim <= 168.0:
        r.add("ppa: t_daily_lim <= t_weekly_lim <= 168 violated")

    econ = spec.economics
    if not 0.0 <= econ.cvar_beta <= 1.0:
        r.add("economics: 0 <= cvar_beta <= 1 violated")
    if not 0.0 < econ.cvar_alpha < 1.0:
        r.add("economics: 0 < cvar_alpha < 1 violated")
    if not 0.0 <= econ.renewable_target <= 1.0:
        r.add("economics: 0 <= renewable_target <= 1 violated")
    if not 0.0 <= econ.renewable_alpha <= 1.0:
        r.add("economics: 0 <= renewable_alpha <= 1 violated")

    return r


@dataclass
class DeratingVerdict:
    """Outcome of checking a de-rating request against the contract.

    ``min_capacity_ok``/``within_rated_ok`` are per-step bound checks;
    ``daily_ok``/``weekly_ok`` are the cumulative energy-budget checks.
    ``daily_energy_kwh`` holds the requested de-rating energy per day and
    ``weekly_energy_kwh`` per (up to 7-day) week.
    """

    min_capacity_ok: bool
    within_rated_ok: bool
    daily_ok: bool
    weekly_ok: bool
    daily_energy_kwh: list[float]
    weekly_energy_kwh: list[float]
    daily_budget_kwh: float
    weekly_budget_kwh: float
    violating_steps: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.min_capacity_ok and self.within_rated_ok and self.daily_ok and self.weekly_ok


def validate_derating(
    profile: DeratingProfile, contract: PpaContract, grid: TimeGrid
) -> DeratingVerdict:
    """Check a requested capacity profile against the contractual limits.

    The profile must span a whole number of days on ``grid``. The verdict
    covers the per-step minimum-capacity guarantee, the per-step rated
    bound, and the cumulative daily and weekly de-rating energy budgets.
    """
    cap = np.asarray(profile.cap, dtype=float)
    steps = grid.steps_per_day
    if len(cap) == 0 or len(cap) % steps != 0:
        raise InputError(
            f"de-rating profile length {len(cap)} is not a whole number of "
            f"{steps}-step days"
        )
    n_days = len(cap) // steps
    if n_days > 7:
        raise InputError("de-rating profile longer than one week is not supported")

    delta = contract.p_gcp_rated - cap
    below_min = cap < contract.p_gcp_min - 1e-9
    above_rated = cap > contract.p_gcp_rated + 1e-9

    daily_energy = [
        float(np.sum(delta[d * steps : (d + 1) * steps]) * grid.step_hours)
        for d in range(n_days)
    ]
    weekly_energy = [float(np.sum(delta) * grid.step_hours)]

    span = contract.p_gcp_rated - contract.p_gcp_min
    daily_budget = span * contract.t_daily_lim
    weekly_budget = span * contract.t_weekly_lim

    return DeratingVerdict(
        min_capacity_ok=not bool(below_min.any()),
        within_rated_ok=not bool(above_rated.any()),
        daily_ok=all(e <= daily_budget + 1e-9 for e in daily_energy),
        weekly_ok=all(e <= weekly_budget + 1e-9 for e in weekly_energy),
        daily_energy_kwh=daily_energy,
        weekly_energy_kwh=weekly_energy,
        daily_budget_kwh=daily_budget,
        weekly_budget_kwh=weekly_budget,
        violating_steps=sorted(
            set(np.nonzero(below_min)[0].tolist()) | set(np.nonzero(above_rated)[0].tolist())
        ),
    )
