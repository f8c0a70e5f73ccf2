"""Point-cloud metrics: Chamfer Distance and threshold F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

DEFAULT_F1_TAU = 0.02


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (n, 3)
    source: str = "external"  # "sampled-from-mesh" | "external"
    seed: int = 0

    def __post_init__(self):
        self.points.setflags(write=False)
        if len(self.points) < 1:
            raise ValueError("point cloud must hold at least one point")
        if not np.isfinite(self.points).all():
            raise ValueError("point cloud holds non-finite coordinates")

    def __len__(self) -> int:
        return len(self.points)


def _pts(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    arr = np.asarray(cloud, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or len(arr) == 0:
        raise ValueError("expected a nonempty (n, 3) point array")
    return arr


def nearest_squared(query, targets) -> np.ndarray:
    """Squared distance from each query point to its nearest target point.

    Neighbors come from a k-d tree; the returned values are recomputed from
    the matched pairs so they are bit-identical to a brute-force scan.
    """
    q = _pts(query)
    t = _pts(targets)
    _, idx = cKDTree(t).query(q, k=1)
    diff = q - t[idx]
    # explicit left-to-right component sum: keeps the value bit-stable under
    # axis-aligned 90-degree rotations (commutativity holds, associativity
    # is never exercised differently)
    return (diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1]) + diff[:, 2] * diff[:, 2]


def chamfer(p, q) -> float:
    """Symmetric mean squared nearest-neighbor distance between two clouds."""
    return float(np.mean(nearest_squared(p, q)) + np.mean(nearest_squared(q, p)))


def f1_score(p, q, tau: float = DEFAULT_F1_TAU) -> float:
    """Harmonic mean of threshold precision/recall at distance tau.

    A point matches when its (unsquared) nearest-neighbor distance is at
    most tau. Returns 0 when precision + recall is 0.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    tau_sq = tau * tau
    precision = float(np.mean(nearest_squared(p, q) <= tau_sq))
    recall = float(np.mean(nearest_squared(q, p) <= tau_sq))
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)
