"""Neighborhood isolation, rescaling, and local PCA for point clouds.

A point cloud is a plain (n, D) float array.  Neighborhoods are rescaled by
the isolation radius so they live inside the unit ball, and the local PCA is
taken about the query point (uncentered second moment), which is the
convention under which a uniform d-disk has top eigenvalues 1/(d+2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

# Below this many members the uniformity test is skipped and the point is
# reported with missing score fields.
MIN_NEIGHBORHOOD = 10

# Past this ambient dimension a KD-tree degenerates to a scan anyway, so
# chunked brute-force distances (BLAS matmul) win.
_BRUTE_DIM = 20
_QUERY_CHUNK = 256


def as_point_cloud(coords) -> np.ndarray:
    arr = np.asarray(coords, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("point cloud must be a nonempty (n, D) array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point cloud entries must be finite")
    return arr


@dataclass(frozen=True)
class Neighborhood:
    """Members of a ball around one point, rescaled by the isolation radius."""

    center_index: int
    member_indices: np.ndarray
    rescaled: np.ndarray
    scale: float


@dataclass(frozen=True)
class PcaResult:
    """Descending eigenvalues of the local second moment, orthonormal basis,
    and the dimension explaining at least eta of the total variance."""

    eigenvalues: np.ndarray
    basis: np.ndarray
    d_hat: int


class NeighborIndex:
    """Shared read-only neighbor-query structure for one cloud.

    Uses a KD-tree in low ambient dimension and chunked brute-force distance
    rows in high dimension.  All queries are exact; k-nearest ties are broken
    by lower point index.
    """

    def __init__(self, coords: np.ndarray):
        self.coords = coords
        self.n, self.dim = coords.shape
        self._brute = self.dim >= _BRUTE_DIM
        self._tree = None if self._brute else cKDTree(coords)
        self._sq_norms = np.einsum("ij,ij->i", coords, coords) if self._brute else None

    def _dist_row(self, i: int) -> np.ndarray:
        diff = self._sq_norms + self._sq_norms[i] - 2.0 * (self.coords @ self.coords[i])
        np.maximum(diff, 0.0, out=diff)
        return np.sqrt(diff)

    def radius_members(self, i: int, r: float) -> np.ndarray:
        """Indices j != i with ||x_j - x_i|| < r (strict), ascending."""
        if self._brute:
            row = self._dist_row(i)
            members = np.flatnonzero(row < r)
        else:
            cand = np.asarray(self._tree.query_ball_point(self.coords[i], r), dtype=int)
            if cand.size:
                dist = np.linalg.norm(self.coords[cand] - self.coords[i], axis=1)
                members = np.sort(cand[dist < r])
            else:
                members = cand
        return members[members != i]

    def knn_members(self, i: int, k: int) -> tuple[np.ndarray, np.ndarray]:
        """k nearest neighbors of point i: (indices, distances), sorted by
        (distance, index) so equal distances resolve to the lower index."""
        if not 1 <= k <= self.n - 1:
            raise ValueError("k must satisfy 1 <= k <= n - 1")
        if self._brute:
            row = self._dist_row(i)
            row[i] = np.inf
            cut = np.partition(row, k - 1)[k - 1]
            cand = np.flatnonzero(row <= cut)
        else:
            dist, _ = self._tree.query(self.coords[i], k=k + 1)
            cut = float(np.max(dist))
            cand = np.asarray(
                self._tree.query_ball_point(self.coords[i], cut * (1 + 1e-12)),
                dtype=int,
            )
            cand = cand[cand != i]
            row = np.full(self.n, np.inf)
            row[cand] = np.linalg.norm(self.coords[cand] - self.coords[i], axis=1)
        order = np.lexsort((cand, row[cand]))
        chosen = cand[order[:k]]
        return chosen, row[chosen]


def neighbors_radius(
    cloud, i: int, r: float, index: NeighborIndex | None = None
) -> Neighborhood:
    """Open-ball neighborhood of point i with the center excluded, rescaled by r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    coords = index.coords if index is not None else as_point_cloud(cloud)
    if index is None:
        index = NeighborIndex(coords)
    members = index.radius_members(i, r)
    rescaled = (coords[members] - coords[i]) / r
    return Neighborhood(i, members, rescaled, float(r))


def neighbors_knn(
    cloud, i: int, k: int, index: NeighborIndex | None = None
) -> Neighborhood:
    """k-nearest neighborhood of point i, rescaled by the k-th neighbor distance."""
    coords = index.coords if index is not None else as_point_cloud(cloud)
    if index is None:
        index = NeighborIndex(coords)
    members, dists = index.knn_members(i, k)
    scale = float(dists[-1])
    diffs = coords[members] - coords[i]
    rescaled = diffs / scale if scale > 0 else np.zeros_like(diffs)
    return Neighborhood(i, members, rescaled, scale)


def second_moment(points) -> np.ndarray:
    """Uncentered second moment (1/k) * sum_j x_j x_j^T."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a nonempty (k, D) array")
    return pts.T @ pts / pts.shape[0]


def estimate_dim(eigenvalues, eta: float) -> int:
    """Smallest number of leading components explaining at least eta of the
    total variance."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must be in (0, 1)")
    ev = np.asarray(eigenvalues, dtype=float)
    total = ev.sum()
    if total <= 0.0:
        raise ValueError("degenerate neighborhood: all eigenvalues zero")
    ratios = np.cumsum(ev) / total
    return int(np.argmax(ratios >= eta - 1e-12)) + 1


def local_pca(points, eta: float) -> PcaResult:
    """Eigendecomposition of the uncentered second moment via SVD of the
    rescaled points (O(k^2 D) instead of O(k D^2) when D dominates)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a nonempty (k, D) array")
    _, s, vt = np.linalg.svd(pts, full_matrices=False)
    eigenvalues = s**2 / pts.shape[0]
    return PcaResult(eigenvalues, vt.T, estimate_dim(eigenvalues, eta))


def project(neighborhood: Neighborhood, pca: PcaResult) -> np.ndarray:
    """Coordinates of the rescaled members in the top-d_hat principal basis."""
    return neighborhood.rescaled @ pca.basis[:, : pca.d_hat]
