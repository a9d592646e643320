"""Independent combination of per-parameter scenarios into flat vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class ComboSet:
    """Sampled scenario combinations.

    ``vectors`` holds one flattened combination per row. ``segments`` records
    the layout as (parameter name, offset, length) in concatenation order, so
    a row can be cut back into its per-parameter pieces. ``indices`` gives the
    per-parameter scenario index that produced each row.
    """

    vectors: np.ndarray
    segments: tuple[tuple[str, int, int], ...]
    indices: np.ndarray

    def slice_of(self, name: str) -> slice:
        for seg_name, offset, length in self.segments:
            if seg_name == name:
                return slice(offset, offset + length)
        raise KeyError(name)


def combine_scenarios(
    per_param_scenarios: Mapping[str, Sequence[np.ndarray]],
    n_combos: int,
    seed,
) -> ComboSet:
    """Draw combinations assuming the parameters are independent.

    For each combination one scenario index per parameter is drawn uniformly
    (with replacement), and the picked per-parameter series are concatenated
    into a single vector. Concatenation follows the mapping's insertion
    order; the pipeline fixes it to: spot, renewable share, carbon intensity,
    GHI, then inelastic and flexible workload per cluster and resource.
    """
    if n_combos < 1:
        raise InputError("need n_combos >= 1")
    names = list(per_param_scenarios)
    if not names:
        raise InputError("need at least one parameter")

    pools = []
    for name in names:
        pool = [np.atleast_1d(np.asarray(s, dtype=float)) for s in per_param_scenarios[name]]
        if not pool:
            raise InputError(f"parameter {name!r} has no scenarios")
        lengths = {len(s) for s in pool}
        if len(lengths) != 1:
            raise InputError(f"parameter {name!r} has ragged scenario lengths {sorted(lengths)}")
        pools.append(np.stack(pool))

    segments = []
    offset = 0
    for name, pool in zip(names, pools):
        segments.append((name, offset, pool.shape[1]))
        offset += pool.shape[1]

    rng = np.random.default_rng(seed)
    highs = np.array([pool.shape[0] for pool in pools])
    indices = rng.integers(0, highs, size=(n_combos, len(names)))

    vectors = np.empty((n_combos, offset))
    for j, (pool, (_, off, length)) in enumerate(zip(pools, segments)):
        vectors[:, off : off + length] = pool[indices[:, j]]

    return ComboSet(vectors=vectors, segments=tuple(segments), indices=indices)
