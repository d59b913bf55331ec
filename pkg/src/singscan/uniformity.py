"""The per-point uniformity test: isolate, rescale, project, score, p-value.

A point is scored by comparing its rescaled, PCA-projected neighborhood
against the uniform distribution on the unit disk of the estimated dimension.
Neighborhoods with fewer than MIN_NEIGHBORHOOD members are reported with
missing score fields instead of being tested.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    MIN_NEIGHBORHOOD,
    NeighborIndex,
    as_point_cloud,
    local_pca,
    neighbors_knn,
    neighbors_radius,
    project,
)
from .kernels import PowerSeriesKernel, mmd_sq_vs_uniform_disk
from .nulls import NullCache, p_value


@dataclass(frozen=True)
class Radius:
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Knn:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class Hyperparams:
    """Neighborhood rule, PCA threshold, and MMD kernel for one detection run."""

    neighborhood: Radius | Knn
    eta: float = 0.8
    kernel: PowerSeriesKernel = PowerSeriesKernel()

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must be in (0, 1)")


@dataclass(frozen=True)
class UniformityResult:
    """Per-point outcome; score fields are None exactly when the neighborhood
    was too small to test (k_obs < MIN_NEIGHBORHOOD)."""

    index: int
    k_obs: int
    d_hat: int | None = None
    mmd: float | None = None
    p_value: float | None = None

    @property
    def missing(self) -> bool:
        return self.p_value is None


def uniformity_test(
    cloud,
    i: int,
    params: Hyperparams,
    nulls: NullCache,
    index: NeighborIndex | None = None,
) -> UniformityResult:
    """Score one point of the cloud against the local-uniformity null."""
    coords = index.coords if index is not None else as_point_cloud(cloud)
    if index is None:
        index = NeighborIndex(coords)
    if isinstance(params.neighborhood, Radius):
        hood = neighbors_radius(coords, i, params.neighborhood.r, index=index)
    else:
        hood = neighbors_knn(coords, i, params.neighborhood.k, index=index)
    k_obs = len(hood.member_indices)
    if k_obs < MIN_NEIGHBORHOOD:
        return UniformityResult(i, k_obs)
    pca = local_pca(hood.rescaled, params.eta)
    projected = project(hood, pca)
    mmd = mmd_sq_vs_uniform_disk(projected, params.kernel)
    table = nulls.get(pca.d_hat, params.kernel)
    return UniformityResult(i, k_obs, pca.d_hat, mmd, p_value(table, k_obs, mmd))


def singularity_scores(
    cloud,
    params: Hyperparams,
    nulls: NullCache,
    subsample_fraction: float = 1.0,
    seed: int = 0,
) -> list[UniformityResult]:
    """Score every point; with subsample_fraction < 1 only a seeded subsample
    of query points is scored and each remaining point inherits the result of
    its nearest scored point."""
    if not 0.0 < subsample_fraction <= 1.0:
        raise ValueError("subsample_fraction must be in (0, 1]")
    coords = as_point_cloud(cloud)
    n = coords.shape[0]
    index = NeighborIndex(coords)

    if subsample_fraction >= 1.0:
        queries = np.arange(n)
    else:
        m = min(n, max(1, math.ceil(subsample_fraction * n)))
        rng = np.random.default_rng(seed)
        queries = np.sort(rng.choice(n, size=m, replace=False))

    results: dict[int, UniformityResult] = {}
    for i in queries:
        results[int(i)] = uniformity_test(coords, int(i), params, nulls, index=index)

    if len(queries) < n:
        scored_tree = cKDTree(coords[queries])
        unscored = np.setdiff1d(np.arange(n), queries, assume_unique=True)
        _, nearest = scored_tree.query(coords[unscored])
        for j, q in zip(unscored, queries[np.atleast_1d(nearest)]):
            results[int(j)] = dataclasses.replace(results[int(q)], index=int(j))

    return [results[i] for i in range(n)]
