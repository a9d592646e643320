"""Block-by-block assembly of the stochastic hub-planning MILP.

Each ``add_*_block`` method appends one physical or financial block; the cost
and emission contributions of every scenario are accumulated as linear
expressions so the objective (and post-solve breakdowns) can be assembled
from the same source of truth. Build order: workload, power/heat, ORC, BESS,
PV, market, heat market, renewable share, objective.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from ..domain.types import (
    COMPUTE_RESOURCES,
    MEMORY_PARTNER,
    MEMORY_RESOURCES,
    ClusterSpec,
    DeratingProfile,
    HubSpec,
    ScenarioSet,
)
from ..errors import BuildError
from .core import BINARY, MilpModel, add_sos2_adjacency
from .index import VariableIndex, vname

COST_CATEGORIES = ("day_ahead", "imbalance", "bess", "heat_revenue", "carbon")

_BIGM_TOL = 1e-9


class LinExpr:
    """Mutable linear expression: variable coefficients plus a constant."""

    __slots__ = ("coeffs", "constant")

    def __init__(self):
        self.coeffs: dict[int, float] = {}
        self.constant = 0.0

    def add(self, var_id: int, coeff: float) -> None:
        if coeff == 0.0:
            return
        value = self.coeffs.get(var_id, 0.0) + coeff
        if value == 0.0:
            self.coeffs.pop(var_id, None)
        else:
            self.coeffs[var_id] = value

    def add_constant(self, value: float) -> None:
        self.constant += value

    def add_expr(self, other: "LinExpr", scale: float = 1.0) -> None:
        for vid, coeff in other.coeffs.items():
            self.add(vid, scale * coeff)
        self.constant += scale * other.constant

    def value(self, values_by_id: Mapping[int, float]) -> float:
        return self.constant + sum(
            coeff * values_by_id[vid] for vid, coeff in self.coeffs.items()
        )


def cluster_resources(cluster: ClusterSpec) -> tuple[str, ...]:
    """Resources the cluster hosts: compute with capacity, plus their memory."""
    hosted = [r for r in COMPUTE_RESOURCES if cluster.capacity.get(r, 0.0) > 0]
    hosted += [
        r
        for r in MEMORY_RESOURCES
        if MEMORY_PARTNER[r] in hosted and r in cluster.mem_ratio
    ]
    return tuple(hosted)


class HubModelBuilder:
    """Assembles the planning MILP for one hub, scenario set and day."""

    def __init__(
        self,
        spec: HubSpec,
        scenarios: ScenarioSet,
        caps: DeratingProfile | None = None,
        native_sos2: bool = True,
        clamp_renewable_imports: bool = False,
        joint_quotas: bool = False,
    ):
        self.spec = spec
        self.sset = scenarios
        self.n_w = len(scenarios)
        self.n_t = scenarios.grid.steps_per_day
        self.dt = scenarios.grid.step_hours
        self.native_sos2 = native_sos2
        self.clamp_renewable_imports = clamp_renewable_imports
        self.joint_quotas = joint_quotas

        if caps is None:
            caps = DeratingProfile.flat(spec.ppa.p_gcp_rated, self.n_t)
        if len(caps) != self.n_t:
            raise BuildError(
                f"cap profile has {len(caps)} steps, scenario grid has {self.n_t}"
            )
        self.caps = caps

        self.model = MilpModel("hubbid")
        self.ix = VariableIndex()
        self.cost: list[dict[str, LinExpr]] = [
            {cat: LinExpr() for cat in COST_CATEGORIES} for _ in range(self.n_w)
        ]
        self.emissions: list[LinExpr] = [LinExpr() for _ in range(self.n_w)]
        self._built: set[str] = set()

    # --- helpers -------------------------------------------------------------

    def _require(self, block: str) -> None:
        if block not in self._built:
            raise BuildError(f"block {block!r} must be built first")

    def scenario_cost(self, w: int) -> LinExpr:
        total = LinExpr()
        for cat in COST_CATEGORIES:
            total.add_expr(self.cost[w][cat])
        return total

    def _inelastic(self, w: int, cluster_id: str, res: str) -> np.ndarray:
        series = self.sset.scenarios[w].workload.inelastic.get((cluster_id, res))
        if series is None:
            return np.zeros(self.n_t)
        if len(series) != self.n_t:
            raise BuildError(
                f"inelastic series for ({cluster_id}, {res}) has {len(series)} "
                f"steps, grid has {self.n_t}"
            )
        return np.asarray(series, dtype=float)

    # --- workload -------------------------------------------------------------

    def add_workload_block(self) -> None:
        """Usage variables with service-level chance constraints.

        Per compute resource: a violation binary relaxes the per-step
        inelastic demand with big-M = capacity, under a probability quota per
        (t, c, res); daily flexible demand is relaxed the same way per
        (c, res); overprovisioning beyond inelastic + flexible is forbidden
        outright. Memory usage is pinned to its compute partner.
        """
        m, ix, dc = self.model, self.ix, self.spec.datacenter
        hosted = {c.id: cluster_resources(c) for c in dc.clusters}
        for w, scen in enumerate(self.sset.scenarios):
            for key in list(scen.workload.inelastic) + list(scen.workload.flexible):
                cid, res = key
                if res in MEMORY_RESOURCES:
                    raise BuildError(
                        f"scenario {w}: demand for memory resource {key} is not "
                        f"allowed; memory follows compute"
                    )
                if cid not in hosted:
                    raise BuildError(f"scenario {w}: demand for unknown cluster {cid!r}")
                if res not in hosted[cid]:
                    raise BuildError(
                        f"scenario {w}: cluster {cid!r} does not host {res}"
                    )
        for w in range(self.n_w):
            for ci, cluster in enumerate(dc.clusters):
                for t in range(self.n_t):
                    for res in cluster_resources(cluster):
                        cap = cluster.capacity.get(res)
                        if cap is None:
                            raise BuildError(
                                f"cluster {cluster.id}: capacity for {res} missing"
                            )
                        ix.u[w, t, cluster.id, res] = m.add_variable(
                            vname("u", w, t, c=ci, res=res), lb=0.0, ub=cap
                        )

        # per-step inelastic chance constraints
        for w in range(self.n_w):
            for ci, cluster in enumerate(dc.clusters):
                for res in [r for r in COMPUTE_RESOURCES if r in cluster_resources(cluster)]:
                    kappa = cluster.capacity[res]
                    demand = self._inelastic(w, cluster.id, res)
                    if np.any(demand > kappa + _BIGM_TOL) or np.any(demand < 0):
                        raise BuildError(
                            f"scenario {w}: inelastic demand for "
                            f"({cluster.id}, {res}) outside [0, capacity]"
                        )
                    for t in range(self.n_t):
                        vid = m.add_variable(
                            vname("vinel", w, t, c=ci, res=res), ub=1.0, kind=BINARY
                        )
                        ix.v_inelastic[w, t, cluster.id, res] = vid
                        m.add_constraint(
                            vname("cc_inel", w, t, c=ci, res=res),
                            {ix.u[w, t, cluster.id, res]: 1.0, vid: kappa},
                            ">=",
                            float(demand[t]),
                        )

        # capacity rows for every hosted resource
        for w in range(self.n_w):
            for ci, cluster in enumerate(dc.clusters):
                for t in range(self.n_t):
                    for res in cluster_resources(cluster):
                        m.add_constraint(
                            vname("cap", w, t, c=ci, res=res),
                            {ix.u[w, t, cluster.id, res]: 1.0},
                            "<=",
                            cluster.capacity[res],
                        )

        # memory coupled to compute through the historical ratio
        for w in range(self.n_w):
            for ci, cluster in enumerate(dc.clusters):
                for t in range(self.n_t):
                    for res in cluster_resources(cluster):
                        if res not in MEMORY_RESOURCES:
                            continue
                        partner = MEMORY_PARTNER[res]
                        m.add_constraint(
                            vname("mem", w, t, c=ci, res=res),
                            {
                                ix.u[w, t, cluster.id, res]: 1.0,
                                ix.u[w, t, cluster.id, partner]: -cluster.mem_ratio[res],
                            },
                            "=",
                            0.0,
                        )

        # daily flexible demand and the overprovision ceiling
        for w in range(self.n_w):
            scen = self.sset.scenarios[w]
            for ci, cluster in enumerate(dc.clusters):
                for res in [r for r in COMPUTE_RESOURCES if r in cluster_resources(cluster)]:
                    flex = float(scen.workload.flexible.get((cluster.id, res), 0.0))
                    if flex < 0:
                        raise BuildError(
                            f"scenario {w}: negative flexible demand for "
                            f"({cluster.id}, {res})"
                        )
                    demand = self._inelastic(w, cluster.id, res)
                    step_sum = {
                        ix.u[w, t, cluster.id, res]: 1.0 for t in range(self.n_t)
                    }
                    vid = m.add_variable(
                        vname("vflex", w, c=ci, res=res), ub=1.0, kind=BINARY
                    )
                    ix.v_flexible[w, cluster.id, res] = vid
                    big_m = flex / self.dt
                    m.add_constraint(
                        vname("cc_flex", w, c=ci, res=res),
                        {**step_sum, vid: big_m},
                        ">=",
                        float(np.sum(demand)) + flex / self.dt,
                    )
                    m.add_constraint(
                        vname("overprov", w, c=ci, res=res),
                        dict(step_sum),
                        "<=",
                        float(np.sum(demand)) + flex / self.dt,
                    )

        self._add_workload_quotas()
        self._built.add("workload")

    def _add_workload_quotas(self) -> None:
        m, ix, dc = self.model, self.ix, self.spec.datacenter
        probs = self.sset.probabilities
        slack_inel = 1.0 - dc.gamma_inelastic
        slack_flex = 1.0 - dc.gamma_flexible

        inel_keys = [
            (ci, cluster, res)
            for ci, cluster in enumerate(dc.clusters)
            for res in COMPUTE_RESOURCES
            if res in cluster_resources(cluster)
        ]
        if self.joint_quotas:
            coeffs: dict[int, float] = {}
            for w in range(self.n_w):
                for t in range(self.n_t):
                    for ci, cluster, res in inel_keys:
                        coeffs[ix.v_inelastic[w, t, cluster.id, res]] = float(probs[w])
            m.add_constraint(
                "quota_inel", coeffs, "<=", slack_inel * self.n_t * len(inel_keys)
            )
            coeffs = {}
            for w in range(self.n_w):
                for ci, cluster, res in inel_keys:
                    coeffs[ix.v_flexible[w, cluster.id, res]] = float(probs[w])
            m.add_constraint("quota_flex", coeffs, "<=", slack_flex * len(inel_keys))
            return

        for t in range(self.n_t):
            for ci, cluster, res in inel_keys:
                m.add_constraint(
                    vname("quota_inel", t=t, c=ci, res=res),
                    {
                        ix.v_inelastic[w, t, cluster.id, res]: float(probs[w])
                        for w in range(self.n_w)
                    },
                    "<=",
                    slack_inel,
                )
        for ci, cluster, res in inel_keys:
            m.add_constraint(
                vname("quota_flex", c=ci, res=res),
                {
                    ix.v_flexible[w, cluster.id, res]: float(probs[w])
                    for w in range(self.n_w)
                },
                "<=",
                slack_flex,
            )

    # --- facility power and recovered heat -------------------------------------

    def add_power_heat_block(self) -> None:
        """Affine IT-power model scaled by PUE, heat recovery and its split."""
        self._require("workload")
        m, ix, dc = self.model, self.ix, self.spec.datacenter
        pue = dc.pue
        for w in range(self.n_w):
            for t in range(self.n_t):
                p_dc = m.add_variable(vname("pdc", w, t))
                ix.p_dc[w, t] = p_dc
                coeffs = {p_dc: 1.0}
                intercept = 0.0
                for cluster in dc.clusters:
                    intercept += pue * cluster.rho_intercept
                    for res in cluster_resources(cluster):
                        rho = cluster.rho_coeff.get(res, 0.0)
                        if rho:
                            coeffs[ix.u[w, t, cluster.id, res]] = -pue * rho
                m.add_constraint(vname("pdc_def", w, t), coeffs, "=", intercept)

                q_rec = m.add_variable(vname("qrec", w, t))
                ix.q_rec[w, t] = q_rec
                coeffs = {q_rec: 1.0}
                idle = 0.0
                for cluster in dc.clusters:
                    if cluster.rec_efficiency <= 0:
                        continue
                    idle += cluster.rec_efficiency * cluster.rec_idle
                    for res in cluster.cooled_resources:
                        rho = cluster.rho_coeff.get(res, 0.0)
                        if rho and (w, t, cluster.id, res) in ix.u:
                            coeffs[ix.u[w, t, cluster.id, res]] = (
                                -cluster.rec_efficiency * rho
                            )
                m.add_constraint(vname("qrec_def", w, t), coeffs, "=", idle)

                orc_ub = (
                    float(self.spec.orc.heat_kw[-1]) if self.spec.orc is not None else 0.0
                )
                ix.q_orc_in[w, t] = m.add_variable(vname("qorcin", w, t), ub=orc_ub)
                ix.q_sold[w, t] = m.add_variable(vname("qsold", w, t))
                ix.q_lost[w, t] = m.add_variable(vname("qlost", w, t))
                m.add_constraint(
                    vname("heat_split", w, t),
                    {
                        q_rec: 1.0,
                        ix.q_orc_in[w, t]: -1.0,
                        ix.q_sold[w, t]: -1.0,
                        ix.q_lost[w, t]: -1.0,
                    },
                    "=",
                    0.0,
                )
        self._built.add("power_heat")

    # --- ORC -------------------------------------------------------------------

    def add_orc_block(self) -> None:
        """Piecewise-linear heat-to-power bound via interpolation weights.

        The weights form an SOS2 set per (scenario, step); when the native
        formulation is disabled the standard segment-binary adjacency rows
        are emitted instead.
        """
        self._require("power_heat")
        orc = self.spec.orc
        if orc is None:
            raise BuildError("hub has no ORC block")
        m, ix = self.model, self.ix
        heat, power = orc.heat_kw, orc.power_kw
        n = len(orc.samples)
        for w in range(self.n_w):
            for t in range(self.n_t):
                lam_ids = []
                for i in range(n):
                    lam_ids.append(
                        m.add_variable(vname("lam", w, t, i=i), lb=0.0, ub=1.0)
                    )
                    ix.lam[w, t, i] = lam_ids[-1]
                m.add_constraint(
                    vname("lam_sum", w, t), {vid: 1.0 for vid in lam_ids}, "=", 1.0
                )
                m.add_constraint(
                    vname("orc_heat", w, t),
                    {ix.q_orc_in[w, t]: 1.0, **{lam_ids[i]: -float(heat[i]) for i in range(n)}},
                    "=",
                    0.0,
                )
                p_orc = m.add_variable(vname("porc", w, t), ub=float(power[-1]))
                ix.p_orc[w, t] = p_orc
                m.add_constraint(
                    vname("orc_power", w, t),
                    {p_orc: 1.0, **{lam_ids[i]: -float(power[i]) for i in range(n)}},
                    "<=",
                    0.0,
                )
                if self.native_sos2:
                    m.add_sos2(lam_ids)
                else:
                    add_sos2_adjacency(m, lam_ids, vname("orc", w, t))
        self._built.add("orc")

    # --- BESS --------------------------------------------------------------------

    def add_bess_block(self) -> None:
        """Bucket storage with exclusivity binaries and throughput aging.

        The stored energy must return to the initial level in expectation
        across scenarios (single row over the whole set), so the battery
        stays a neutral daily buffer.
        """
        self._require("workload")
        bess = self.spec.bess
        if bess is None:
            raise BuildError("hub has no BESS block")
        if not bess.e_min <= bess.e_init <= bess.e_max:
            raise BuildError(
                f"BESS e_init {bess.e_init} outside [{bess.e_min}, {bess.e_max}]"
            )
        m, ix = self.model, self.ix
        eta = bess.eta_oneway
        aging_rate = self.dt / (2.0 * bess.rated_cycles * bess.e_rated)
        for w in range(self.n_w):
            for t in range(self.n_t):
                pc = m.add_variable(vname("pbc", w, t), ub=bess.p_rated)
                pd = m.add_variable(vname("pbd", w, t), ub=bess.p_rated)
                z = m.add_variable(vname("zbess", w, t), ub=1.0, kind=BINARY)
                pac = m.add_variable(
                    vname("pbac", w, t), lb=-eta * bess.p_rated, ub=bess.p_rated / eta
                )
                e = m.add_variable(vname("ebess", w, t + 1), lb=bess.e_min, ub=bess.e_max)
                a = m.add_variable(vname("abess", w, t))
                ix.p_bess_c[w, t] = pc
                ix.p_bess_d[w, t] = pd
                ix.z_bess[w, t] = z
                ix.p_bess_ac[w, t] = pac
                ix.e_bess[w, t + 1] = e
                ix.a_bess[w, t] = a

                if t == 0:
                    m.add_constraint(
                        vname("bess_soc", w, t),
                        {e: 1.0, pc: -self.dt, pd: self.dt},
                        "=",
                        bess.e_init,
                    )
                else:
                    m.add_constraint(
                        vname("bess_soc", w, t),
                        {e: 1.0, ix.e_bess[w, t]: -1.0, pc: -self.dt, pd: self.dt},
                        "=",
                        0.0,
                    )
                m.add_constraint(
                    vname("bess_ac", w, t),
                    {pac: 1.0, pc: -1.0 / eta, pd: eta},
                    "=",
                    0.0,
                )
                m.add_constraint(
                    vname("bess_exc", w, t), {pc: 1.0, z: -bess.p_rated}, "<=", 0.0
                )
                m.add_constraint(
                    vname("bess_exd", w, t),
                    {pd: 1.0, z: bess.p_rated},
                    "<=",
                    bess.p_rated,
                )
                # one of pc/pd is zero, so pc + pd equals |P_bess|
                m.add_constraint(
                    vname("bess_aging", w, t),
                    {a: 1.0, pc: -aging_rate, pd: -aging_rate},
                    "=",
                    0.0,
                )
                self.cost[w]["bess"].add(a, bess.investment_cost)
                self.emissions[w].add(a, bess.lca_emissions)
                self.cost[w]["carbon"].add(
                    a, self.spec.economics.carbon_price * bess.lca_emissions
                )

        probs = self.sset.probabilities
        coeffs: dict[int, float] = {}
        for w in range(self.n_w):
            for t in range(self.n_t):
                coeffs[ix.p_bess_c[w, t]] = float(probs[w])
                coeffs[ix.p_bess_d[w, t]] = -float(probs[w])
        m.add_constraint("bess_expect", coeffs, "=", 0.0)
        self._built.add("bess")

    # --- PV ------------------------------------------------------------------------

    def add_pv_block(self) -> None:
        """Curtailable PV bounded by the irradiance ratio."""
        pv = self.spec.pv
        if pv is None:
            raise BuildError("hub has no PV block")
        m, ix = self.model, self.ix
        for w in range(self.n_w):
            ghi = self.sset.scenarios[w].exogenous.ghi
            if len(ghi) != self.n_t:
                raise BuildError(f"scenario {w}: ghi has {len(ghi)} steps, grid {self.n_t}")
            for t in range(self.n_t):
                bound = max(float(ghi[t]), 0.0) / pv.ghi_ref * pv.p_rated
                ix.p_pv[w, t] = m.add_variable(vname("ppv", w, t), ub=bound)
        self._built.add("pv")

    # --- market -----------------------------------------------------------------------

    def add_market_block(self, da_split: bool = True) -> None:
        """GCP balance, day-ahead/imbalance decomposition, cap and carbon.

        With ``da_split`` false (fixed-tariff supply) no day-ahead or
        imbalance variables exist and energy cost is attached later by
        :meth:`add_tou_objective`.
        """
        self._require("power_heat")
        m, ix, econ = self.model, self.ix, self.spec.economics
        rated = self.spec.ppa.p_gcp_rated
        if da_split:
            for t in range(self.n_t):
                ix.p_da[t] = m.add_variable(vname("pda", t=t), lb=-rated, ub=rated)
        for w in range(self.n_w):
            exo = self.sset.scenarios[w].exogenous
            for series_name in ("spot", "price_short", "price_long", "carbon_intensity"):
                if len(getattr(exo, series_name)) != self.n_t:
                    raise BuildError(
                        f"scenario {w}: {series_name} has "
                        f"{len(getattr(exo, series_name))} steps, grid {self.n_t}"
                    )
            for t in range(self.n_t):
                p_gcp = m.add_variable(vname("pgcp", w, t), lb=-rated, ub=rated)
                ix.p_gcp[w, t] = p_gcp
                balance = {p_gcp: 1.0, ix.p_dc[w, t]: -1.0}
                if (w, t) in ix.p_orc:
                    balance[ix.p_orc[w, t]] = 1.0
                if (w, t) in ix.p_bess_ac:
                    balance[ix.p_bess_ac[w, t]] = -1.0
                if (w, t) in ix.p_pv:
                    balance[ix.p_pv[w, t]] = 1.0
                m.add_constraint(vname("gcp_bal", w, t), balance, "=", 0.0)

                if da_split:
                    p_imb = m.add_variable(vname("pimb", w, t), lb=-2 * rated, ub=2 * rated)
                    p_plus = m.add_variable(vname("pplus", w, t), ub=rated)
                    p_minus = m.add_variable(vname("pminus", w, t), ub=rated)
                    z = m.add_variable(vname("zimb", w, t), ub=1.0, kind=BINARY)
                    ix.p_imb[w, t] = p_imb
                    ix.p_plus[w, t] = p_plus
                    ix.p_minus[w, t] = p_minus
                    ix.z_imb[w, t] = z
                    m.add_constraint(
                        vname("gcp_split", w, t),
                        {p_gcp: 1.0, ix.p_da[t]: -1.0, p_imb: -1.0},
                        "=",
                        0.0,
                    )
                    m.add_constraint(
                        vname("imb_split", w, t),
                        {p_imb: 1.0, p_plus: -1.0, p_minus: 1.0},
                        "=",
                        0.0,
                    )
                    m.add_constraint(
                        vname("imb_excp", w, t), {p_plus: 1.0, z: -rated}, "<=", 0.0
                    )
                    m.add_constraint(
                        vname("imb_excm", w, t), {p_minus: 1.0, z: rated}, "<=", rated
                    )
                    self.cost[w]["day_ahead"].add(
                        ix.p_da[t], float(exo.spot[t]) * self.dt
                    )
                    self.cost[w]["imbalance"].add(
                        p_plus, float(exo.price_short[t]) * self.dt
                    )
                    self.cost[w]["imbalance"].add(
                        p_minus, -float(exo.price_long[t]) * self.dt
                    )

                m.add_constraint(
                    vname("gcp_cap", w, t), {p_gcp: 1.0}, "<=", float(self.caps.cap[t])
                )

                carbon = float(exo.carbon_intensity[t]) * self.dt
                self.emissions[w].add(p_gcp, carbon)
                self.cost[w]["carbon"].add(p_gcp, econ.carbon_price * carbon)
        self._built.add("market")

    # --- heat market ----------------------------------------------------------------------

    def add_heat_market_block(self) -> None:
        """Heat sales revenue, limited by the district heating demand."""
        self._require("power_heat")
        m, ix, econ = self.model, self.ix, self.spec.economics
        for w in range(self.n_w):
            demand = self.sset.scenarios[w].exogenous.heat_demand
            if len(demand) != self.n_t:
                raise BuildError(
                    f"scenario {w}: heat_demand has {len(demand)} steps, grid {self.n_t}"
                )
            for t in range(self.n_t):
                m.add_constraint(
                    vname("heat_sold_lim", w, t),
                    {ix.q_sold[w, t]: 1.0},
                    "<=",
                    max(float(demand[t]), 0.0),
                )
                self.cost[w]["heat_revenue"].add(
                    ix.q_sold[w, t], -econ.heat_price * self.dt
                )
        self._built.add("heat_market")

    # --- renewable share ---------------------------------------------------------------------

    def add_renewable_block(self) -> None:
        """Non-renewable energy tally and the renewable-share chance constraint.

        Signed GCP power feeds the tally, so exports reduce it; with
        ``clamp_renewable_imports`` only imports count.
        """
        self._require("market")
        m, ix, econ = self.model, self.ix, self.spec.economics
        rated = self.spec.ppa.p_gcp_rated
        big_m = rated * 24.0
        probs = self.sset.probabilities
        for w in range(self.n_w):
            share = self.sset.scenarios[w].exogenous.renewable_share
            if len(share) != self.n_t:
                raise BuildError(
                    f"scenario {w}: renewable_share has {len(share)} steps, grid {self.n_t}"
                )
            for t in range(self.n_t):
                source = ix.p_gcp[w, t]
                if self.clamp_renewable_imports:
                    imp = m.add_variable(vname("pimp", w, t), lb=0.0, ub=rated)
                    m.add_constraint(
                        vname("imp_floor", w, t),
                        {imp: 1.0, ix.p_gcp[w, t]: -1.0},
                        ">=",
                        0.0,
                    )
                    source = imp
                factor = (1.0 - float(share[t])) * self.dt
                e = m.add_variable(
                    vname("enr", w, t + 1), lb=-math.inf, ub=math.inf
                )
                ix.e_nonren[w, t + 1] = e
                coeffs = {e: 1.0, source: -factor}
                if t > 0:
                    coeffs[ix.e_nonren[w, t]] = -1.0
                m.add_constraint(vname("nonren_soc", w, t), coeffs, "=", 0.0)

            e_dc = m.add_variable(vname("edc", w))
            ix.e_dc[w] = e_dc
            m.add_constraint(
                vname("edc_def", w),
                {e_dc: 1.0, **{ix.p_dc[w, t]: -self.dt for t in range(self.n_t)}},
                "=",
                0.0,
            )
            v = m.add_variable(vname("vren", w), ub=1.0, kind=BINARY)
            ix.v_ren[w] = v
            m.add_constraint(
                vname("cc_ren", w),
                {
                    ix.e_nonren[w, self.n_t]: 1.0,
                    e_dc: -(1.0 - econ.renewable_target),
                    v: -big_m,
                },
                "<=",
                0.0,
            )
        m.add_constraint(
            "quota_ren",
            {ix.v_ren[w]: float(probs[w]) for w in range(self.n_w)},
            "<=",
            econ.renewable_alpha,
        )
        self._built.add("renewable")

    # --- objectives ---------------------------------------------------------------------------

    def _add_cvar_objective(self) -> None:
        m, ix, econ = self.model, self.ix, self.spec.economics
        alpha, beta = econ.cvar_alpha, econ.cvar_beta
        probs = self.sset.probabilities
        ix.zeta = m.add_variable("zeta", lb=-math.inf, ub=math.inf)
        for w in range(self.n_w):
            ix.eta[w] = m.add_variable(vname("eta", w))
        for w in range(self.n_w):
            total = self.scenario_cost(w)
            coeffs = {ix.eta[w]: 1.0, ix.zeta: 1.0}
            for vid, coeff in total.coeffs.items():
                coeffs[vid] = coeffs.get(vid, 0.0) - coeff
            m.add_constraint(vname("cvar_tail", w), coeffs, ">=", total.constant)
            # expectation part
            weight = (1.0 - beta) * float(probs[w])
            for vid, coeff in total.coeffs.items():
                m.add_objective_term(vid, weight * coeff)
            m.add_objective_constant(weight * total.constant)
            # tail part
            m.add_objective_term(ix.eta[w], beta / (1.0 - alpha) * float(probs[w]))
        m.add_objective_term(ix.zeta, beta)
        self._built.add("objective")

    def add_objective_cvar(self) -> None:
        """Risk-weighted objective: (1-beta) expected cost + beta CVaR."""
        self._require("market")
        if "objective" in self._built:
            raise BuildError("objective already added")
        self._add_cvar_objective()

    def add_tou_objective(self) -> None:
        """Fixed-tariff energy cost in place of day-ahead plus imbalance."""
        self._require("market")
        if "objective" in self._built:
            raise BuildError("objective already added")
        tariff = self.spec.economics.tou_tariff
        if tariff is None:
            raise BuildError("economics.tou_tariff is required for the tariff scheme")
        if len(tariff) != self.n_t:
            raise BuildError(
                f"tou_tariff has {len(tariff)} steps, grid has {self.n_t}"
            )
        if self.ix.p_da:
            raise BuildError(
                "tariff objective requires the market block without day-ahead split"
            )
        for w in range(self.n_w):
            for t in range(self.n_t):
                self.cost[w]["day_ahead"].add(
                    self.ix.p_gcp[w, t], float(tariff[t]) * self.dt
                )
        self._add_cvar_objective()

    def fix_day_ahead(self, day_ahead: Sequence[float]) -> None:
        """Pin the day-ahead profile to an already-submitted bid."""
        if not self.ix.p_da:
            raise BuildError("model has no day-ahead variables")
        values = np.asarray(day_ahead, dtype=float)
        if len(values) != self.n_t:
            raise BuildError(
                f"bid has {len(values)} steps, grid has {self.n_t}"
            )
        for t in range(self.n_t):
            var = self.model.variables[self.ix.p_da[t]]
            var.lb = float(values[t])
            var.ub = float(values[t])


def build_hub_model(
    spec: HubSpec,
    scenarios: ScenarioSet,
    caps: DeratingProfile | None = None,
    scheme: str = "custom",
    native_sos2: bool = True,
    clamp_renewable_imports: bool = False,
    joint_quotas: bool = False,
) -> HubModelBuilder:
    """Assemble the full planning model for one day.

    ``scheme`` selects the supply agreement: ``"custom"`` bids into the
    day-ahead market and settles imbalances; ``"tou"`` pays fixed per-step
    tariffs for the metered GCP power.
    """
    if scheme not in ("custom", "tou"):
        raise BuildError(f"unknown scheme {scheme!r}")
    b = HubModelBuilder(
        spec,
        scenarios,
        caps,
        native_sos2=native_sos2,
        clamp_renewable_imports=clamp_renewable_imports,
        joint_quotas=joint_quotas,
    )
    b.add_workload_block()
    b.add_power_heat_block()
    if spec.orc is not None:
        b.add_orc_block()
    if spec.bess is not None:
        b.add_bess_block()
    if spec.pv is not None:
        b.add_pv_block()
    b.add_market_block(da_split=scheme == "custom")
    b.add_heat_market_block()
    b.add_renewable_block()
    if scheme == "custom":
        b.add_objective_cvar()
    else:
        b.add_tou_objective()
    return b
