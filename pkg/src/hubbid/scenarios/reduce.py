"""K-means scenario reduction with in-sample representatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from ..errors import InputError


@dataclass(frozen=True)
class ReducedSet:
    """Reduction result: representative rows of the input and their weights.

    Each representative is one of the input vectors, bit-identical;
    ``member_index`` gives its row in the input. Probabilities are cluster
    populations over the total and sum to 1.
    """

    vectors: np.ndarray
    probabilities: np.ndarray
    member_index: np.ndarray


def reduce_kmeans(combos: np.ndarray, k: int, seed: int) -> ReducedSet:
    """Reduce combination vectors to ``k`` weighted representatives.

    Vectors are standardized per dimension (z-score; zero-variance dimensions
    pass through unscaled) so that price-scale and workload-scale entries
    contribute comparably to the L2 metric, then clustered with Lloyd's
    algorithm and k-means++ seeding. Each cluster is represented by its
    member nearest the centroid, weighted by the cluster population.
    """
    combos = np.asarray(combos, dtype=float)
    if combos.ndim != 2 or combos.shape[0] == 0:
        raise InputError("combos must be a non-empty 2-D array")
    n = combos.shape[0]
    n_distinct = len(np.unique(combos, axis=0))
    if k < 1 or k > n_distinct:
        raise InputError(f"k must be in [1, {n_distinct}] (distinct combos), got {k}")

    mean = combos.mean(axis=0)
    std = combos.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    z = (combos - mean) / scale

    km = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=10,
        algorithm="lloyd",
        random_state=seed,
    ).fit(z)
    labels = km.labels_

    reps = np.empty(k, dtype=int)
    probs = np.empty(k)
    for c in range(k):
        members = np.nonzero(labels == c)[0]
        if len(members) == 0:
            raise InputError(f"clustering produced an empty cluster ({c})")
        dist = np.linalg.norm(z[members] - km.cluster_centers_[c], axis=1)
        reps[c] = members[int(np.argmin(dist))]
        probs[c] = len(members) / n

    return ReducedSet(
        vectors=combos[reps].copy(),
        probabilities=probs,
        member_index=reps,
    )
