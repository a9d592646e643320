"""Independent feasibility and invariant checks on solved models.

``check_solution`` replays a solution against the raw rows, bounds,
integrality and SOS2 sets of a model. ``solution_invariants`` recomputes the
physical quantities of a hub plan from scratch (usage, power, heat, storage,
quotas), without trusting the model coefficients. Both return a list of
violation strings, empty when clean. Values within ``tol`` of an integer or
of zero are snapped before logical tests such as exclusivity products.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..domain.types import COMPUTE_RESOURCES, MEMORY_PARTNER
from ..model.builder import HubModelBuilder, cluster_resources
from ..model.core import BINARY, MilpModel

_INT_TOL = 1e-5


def check_solution(
    model: MilpModel, values: Mapping[str, float], tol: float = 1e-6
) -> list[str]:
    """Verify a named solution against every row, bound and SOS2 set."""
    out: list[str] = []
    x = np.empty(model.n_variables)
    for vid, v in enumerate(model.variables):
        if v.name not in values:
            out.append(f"variable {v.name} has no value")
            x[vid] = 0.0
            continue
        x[vid] = float(values[v.name])
        if x[vid] < v.lb - tol or x[vid] > v.ub + tol:
            out.append(
                f"variable {v.name} = {x[vid]} outside [{v.lb}, {v.ub}]"
            )
        if v.kind == BINARY and abs(x[vid] - round(x[vid])) > _INT_TOL:
            out.append(f"binary {v.name} = {x[vid]} is fractional")

    for c in model.constraints:
        lhs = sum(coeff * x[vid] for vid, coeff in c.coeffs.items())
        if c.sense == "<=" and lhs > c.rhs + tol:
            out.append(f"row {c.name}: {lhs} > {c.rhs}")
        elif c.sense == ">=" and lhs < c.rhs - tol:
            out.append(f"row {c.name}: {lhs} < {c.rhs}")
        elif c.sense == "=" and abs(lhs - c.rhs) > tol:
            out.append(f"row {c.name}: {lhs} != {c.rhs}")

    for k, ids in enumerate(model.sos2_sets):
        nonzero = [i for i, vid in enumerate(ids) if abs(x[vid]) > tol]
        if len(nonzero) > 2:
            out.append(f"SOS2 set {k}: {len(nonzero)} nonzero members")
        elif len(nonzero) == 2 and nonzero[1] - nonzero[0] != 1:
            out.append(f"SOS2 set {k}: nonzero members not adjacent")
    return out


def _snap(value: float, tol: float) -> float:
    return 0.0 if abs(value) <= tol else value


def solution_invariants(
    builder: HubModelBuilder, values: Mapping[str, float], tol: float = 1e-6
) -> list[str]:
    """Recompute hub physics from the solution and flag broken invariants."""
    out: list[str] = []
    spec, ix, sset = builder.spec, builder.ix, builder.sset
    n_w, n_t, dt = builder.n_w, builder.n_t, builder.dt
    dc = spec.datacenter
    agg_tol = tol * max(1.0, float(n_t))

    def val(family: dict, *key) -> float:
        vid = family[key if len(key) > 1 else key[0]]
        return float(values[builder.model.variables[vid].name])

    for w in range(n_w):
        scen = sset.scenarios[w]
        for t in range(n_t):
            # usage, memory coupling, capacity
            p_it = 0.0
            q_rec_expected = 0.0
            for cluster in dc.clusters:
                p_it += cluster.rho_intercept
                rec = cluster.rec_efficiency * cluster.rec_idle
                for res in cluster_resources(cluster):
                    u = val(ix.u, w, t, cluster.id, res)
                    if u < -tol or u > cluster.capacity[res] + tol:
                        out.append(
                            f"w{w} t{t} {cluster.id}/{res}: usage {u} outside capacity"
                        )
                    p_it += cluster.rho_coeff.get(res, 0.0) * u
                    if res in cluster.cooled_resources:
                        rec += (
                            cluster.rec_efficiency
                            * cluster.rho_coeff.get(res, 0.0)
                            * u
                        )
                    if res in MEMORY_PARTNER:
                        partner = val(ix.u, w, t, cluster.id, MEMORY_PARTNER[res])
                        want = cluster.mem_ratio[res] * partner
                        if abs(u - want) > tol * (1.0 + cluster.mem_ratio[res]):
                            out.append(
                                f"w{w} t{t} {cluster.id}/{res}: memory {u} != "
                                f"ratio * compute {want}"
                            )
                q_rec_expected += rec

            p_dc = val(ix.p_dc, w, t)
            if abs(p_dc - dc.pue * p_it) > tol * dc.pue * max(1.0, abs(p_it)):
                out.append(f"w{w} t{t}: facility power {p_dc} != {dc.pue * p_it}")

            # heat recovery and conservation
            q_rec = val(ix.q_rec, w, t)
            if abs(q_rec - q_rec_expected) > tol * max(1.0, q_rec_expected):
                out.append(f"w{w} t{t}: recovered heat {q_rec} != {q_rec_expected}")
            q_orc_in = val(ix.q_orc_in, w, t)
            q_sold = val(ix.q_sold, w, t)
            q_lost = val(ix.q_lost, w, t)
            if abs(q_rec - q_orc_in - q_sold - q_lost) > tol * max(1.0, q_rec):
                out.append(f"w{w} t{t}: heat split does not conserve {q_rec}")
            if q_sold > float(scen.exogenous.heat_demand[t]) + tol:
                out.append(f"w{w} t{t}: sold heat {q_sold} above demand")

            # ORC curve
            if spec.orc is not None:
                p_orc = val(ix.p_orc, w, t)
                bound = spec.orc.power_bound(q_orc_in)
                if p_orc > bound + tol * max(1.0, bound):
                    out.append(
                        f"w{w} t{t}: ORC power {p_orc} above curve bound {bound}"
                    )

            # grid connection balance
            p_gcp = val(ix.p_gcp, w, t)
            expected = p_dc
            if spec.orc is not None:
                expected -= val(ix.p_orc, w, t)
            if spec.bess is not None:
                expected += val(ix.p_bess_ac, w, t)
            if spec.pv is not None:
                expected -= val(ix.p_pv, w, t)
            if abs(p_gcp - expected) > tol:
                out.append(f"w{w} t{t}: balance residual {p_gcp - expected}")
            if p_gcp > float(builder.caps.cap[t]) + tol:
                out.append(f"w{w} t{t}: grid power {p_gcp} above cap")

            # market split exclusivity
            if ix.p_da:
                p_da = float(values[builder.model.variables[ix.p_da[t]].name])
                p_imb = val(ix.p_imb, w, t)
                p_plus = _snap(val(ix.p_plus, w, t), tol)
                p_minus = _snap(val(ix.p_minus, w, t), tol)
                if abs(p_gcp - p_da - p_imb) > tol:
                    out.append(f"w{w} t{t}: day-ahead split residual")
                if abs(p_imb - p_plus + p_minus) > tol:
                    out.append(f"w{w} t{t}: imbalance split residual")
                if p_plus * p_minus != 0.0:
                    out.append(
                        f"w{w} t{t}: simultaneous shortage {p_plus} and surplus "
                        f"{p_minus}"
                    )

        # BESS trajectory, exclusivity and aging
        if spec.bess is not None:
            bess = spec.bess
            energy = bess.e_init
            for t in range(n_t):
                pc = _snap(val(ix.p_bess_c, w, t), tol)
                pd = _snap(val(ix.p_bess_d, w, t), tol)
                if pc * pd != 0.0:
                    out.append(f"w{w} t{t}: BESS charges {pc} and discharges {pd}")
                p_ac = val(ix.p_bess_ac, w, t)
                want = pc / bess.eta_oneway - bess.eta_oneway * pd
                if abs(p_ac - want) > tol * max(1.0, abs(want)):
                    out.append(f"w{w} t{t}: BESS AC power {p_ac} != {want}")
                energy += dt * (pc - pd)
                if energy < bess.e_min - agg_tol or energy > bess.e_max + agg_tol:
                    out.append(f"w{w} t{t}: stored energy {energy} outside limits")
                reported = val(ix.e_bess, w, t + 1)
                if abs(reported - energy) > agg_tol:
                    out.append(
                        f"w{w} t{t}: stored energy {reported} != recomputed {energy}"
                    )
                a = val(ix.a_bess, w, t)
                want = (pc + pd) * dt / (2.0 * bess.rated_cycles * bess.e_rated)
                if abs(a - want) > tol:
                    out.append(f"w{w} t{t}: aging {a} != {want}")

    # BESS neutrality in expectation
    if spec.bess is not None:
        probs = sset.probabilities
        drift = sum(
            float(probs[w])
            * sum(
                val(ix.p_bess_c, w, t) - val(ix.p_bess_d, w, t) for t in range(n_t)
            )
            for w in range(n_w)
        )
        if abs(drift) > agg_tol:
            out.append(f"BESS expected net exchange {drift} != 0")

    out.extend(_workload_invariants(builder, values, tol))
    out.extend(_renewable_invariants(builder, values, tol))
    return out


def _workload_invariants(
    builder: HubModelBuilder, values: Mapping[str, float], tol: float
) -> list[str]:
    out: list[str] = []
    spec, ix, sset = builder.spec, builder.ix, builder.sset
    n_w, n_t, dt = builder.n_w, builder.n_t, builder.dt
    dc = spec.datacenter
    probs = sset.probabilities
    agg_tol = tol * max(1.0, float(n_t))

    def val(family: dict, *key) -> float:
        vid = family[key if len(key) > 1 else key[0]]
        return float(values[builder.model.variables[vid].name])

    inel_keys = [
        (cluster, res)
        for cluster in dc.clusters
        for res in COMPUTE_RESOURCES
        if res in cluster_resources(cluster)
    ]

    for cluster, res in inel_keys:
        kappa = cluster.capacity[res]
        for t in range(n_t):
            mass = 0.0
            for w in range(n_w):
                v = round(val(ix.v_inelastic, w, t, cluster.id, res))
                mass += float(probs[w]) * v
                if v == 0:
                    demand = builder._inelastic(w, cluster.id, res)[t]
                    u = val(ix.u, w, t, cluster.id, res)
                    if u < demand - tol * max(1.0, kappa):
                        out.append(
                            f"w{w} t{t} {cluster.id}/{res}: usage {u} below "
                            f"unrelaxed demand {demand}"
                        )
            if not builder.joint_quotas and mass > 1.0 - dc.gamma_inelastic + tol:
                out.append(
                    f"t{t} {cluster.id}/{res}: inelastic violation mass {mass} "
                    f"above quota"
                )

        flex_mass = 0.0
        for w in range(n_w):
            scen = sset.scenarios[w]
            flex = float(scen.workload.flexible.get((cluster.id, res), 0.0))
            demand = builder._inelastic(w, cluster.id, res)
            total = sum(val(ix.u, w, t, cluster.id, res) for t in range(n_t))
            budget = float(np.sum(demand)) + flex / dt
            if total > budget + agg_tol:
                out.append(
                    f"w{w} {cluster.id}/{res}: usage total {total} above "
                    f"inelastic + flexible budget {budget}"
                )
            v = round(val(ix.v_flexible, w, cluster.id, res))
            flex_mass += float(probs[w]) * v
            if v == 0 and total < budget - agg_tol:
                out.append(
                    f"w{w} {cluster.id}/{res}: usage total {total} below "
                    f"unrelaxed flexible demand {budget}"
                )
        if not builder.joint_quotas and flex_mass > 1.0 - dc.gamma_flexible + tol:
            out.append(
                f"{cluster.id}/{res}: flexible violation mass {flex_mass} above quota"
            )
    return out


def _renewable_invariants(
    builder: HubModelBuilder, values: Mapping[str, float], tol: float
) -> list[str]:
    out: list[str] = []
    spec, ix, sset = builder.spec, builder.ix, builder.sset
    n_w, n_t, dt = builder.n_w, builder.n_t, builder.dt
    probs = sset.probabilities
    agg_tol = tol * max(1.0, float(n_t)) * max(1.0, spec.ppa.p_gcp_rated)

    def val(family: dict, *key) -> float:
        vid = family[key if len(key) > 1 else key[0]]
        return float(values[builder.model.variables[vid].name])

    mass = 0.0
    for w in range(n_w):
        share = sset.scenarios[w].exogenous.renewable_share
        e_nonren = 0.0
        e_dc = 0.0
        for t in range(n_t):
            p = val(ix.p_gcp, w, t)
            if builder.clamp_renewable_imports:
                p = max(p, 0.0)
            e_nonren += (1.0 - float(share[t])) * p * dt
            e_dc += val(ix.p_dc, w, t) * dt
        v = round(val(ix.v_ren, w))
        mass += float(probs[w]) * v
        if v == 0:
            limit = (1.0 - spec.economics.renewable_target) * e_dc
            if e_nonren > limit + agg_tol:
                out.append(
                    f"w{w}: non-renewable energy {e_nonren} above unrelaxed "
                    f"limit {limit}"
                )
    if mass > spec.economics.renewable_alpha + tol:
        out.append(f"renewable violation mass {mass} above quota")
    return out
