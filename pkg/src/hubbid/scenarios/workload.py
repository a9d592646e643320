"""Folding flexible demand uniformly into inelastic usage series."""

from __future__ import annotations

import numpy as np

from ..domain.types import DataCenterSpec, TimeGrid, WorkloadScenario
from ..errors import PlanningInfeasibleError


def _spread(base: np.ndarray, headroom: np.ndarray, amount: float) -> np.ndarray:
    """Add ``amount`` resource-steps to ``base``, even where headroom allows.

    Steps whose headroom is below the even share are filled to capacity and
    the excess spills evenly over the remaining steps.
    """
    add = np.zeros_like(base)
    active = headroom > 1e-12
    remaining = amount
    while remaining > 1e-12:
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            raise PlanningInfeasibleError(
                "flexible demand exceeds remaining daily capacity"
            )
        share = remaining / len(idx)
        capped = idx[headroom[idx] - add[idx] < share - 1e-12]
        if len(capped) == 0:
            # exact finish: charge the even share, absorbing rounding in the last step
            add[idx[:-1]] += share
            add[idx[-1]] += remaining - share * (len(idx) - 1)
            break
        add[capped] = headroom[capped]
        remaining = amount - float(np.sum(add))
        active[capped] = False
    return base + add


def redistribute_flexible_uniform(
    workload: WorkloadScenario, dc: DataCenterSpec, grid: TimeGrid
) -> WorkloadScenario:
    """Turn flexible daily totals into a uniform add-on to inelastic usage.

    Each flexible total F (resource-hours) becomes F / (steps * step_hours)
    extra units on every step of the matching inelastic series, capped at the
    cluster capacity with the excess spilled evenly over uncapped steps. The
    daily resource-hours total is preserved; demand beyond the day's capacity
    raises :class:`~hubbid.errors.PlanningInfeasibleError`.
    """
    inelastic = {k: np.asarray(v, dtype=float).copy() for k, v in workload.inelastic.items()}
    for (cluster_id, res), total in workload.flexible.items():
        if total < 0:
            raise PlanningInfeasibleError(
                f"negative flexible total for ({cluster_id}, {res})"
            )
        if total == 0:
            continue
        base = inelastic.get((cluster_id, res))
        if base is None:
            base = np.zeros(grid.steps_per_day)
        cap = dc.cluster(cluster_id).capacity.get(res, 0.0)
        headroom = np.maximum(cap - base, 0.0)
        amount = total / grid.step_hours
        if amount > float(np.sum(headroom)) + 1e-9:
            raise PlanningInfeasibleError(
                f"flexible demand {total} resource-hours for ({cluster_id}, {res}) "
                f"exceeds daily capacity headroom {float(np.sum(headroom)) * grid.step_hours}"
            )
        inelastic[cluster_id, res] = _spread(base, headroom, amount)
    return WorkloadScenario(inelastic=inelastic, flexible={k: 0.0 for k in workload.flexible})
