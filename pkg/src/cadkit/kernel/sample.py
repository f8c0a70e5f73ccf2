"""Uniform surface sampling over the CSG boundary of a solid."""

from __future__ import annotations

import numpy as np

from ..errors import EmptySolidError
from .mesh import primitive_surface_triangles
from .solid import Solid, membership_many

BOUNDARY_EPS_FACTOR = 1e-4
RETRY_FACTOR = 50


def sample_surface(solid: Solid, n: int, seed: int) -> np.ndarray:
    """Draw n points uniformly (by area) on the solid's final surface.

    Candidates are drawn area-weighted from every primitive's shell
    triangles; a candidate survives only if membership flips across the
    surface normal at +/- eps (eps = 1e-4 of the bbox diagonal), i.e. the
    point lies on the boundary of the boolean result, not inside or on cut
    material. Deterministic for a fixed (solid, n, seed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    soup = np.concatenate(
        [primitive_surface_triangles(p) for p in solid.primitives], axis=0
    )
    a = soup[:, 0]
    b = soup[:, 1]
    c = soup[:, 2]
    cross = np.cross(b - a, c - a)
    norm = np.linalg.norm(cross, axis=1)
    ok = norm > 0.0
    a, b, c, cross, norm = a[ok], b[ok], c[ok], cross[ok], norm[ok]
    if len(a) == 0:
        raise EmptySolidError("solid has no boundary triangles")
    normals = cross / norm[:, None]
    weights = norm / norm.sum()
    eps = BOUNDARY_EPS_FACTOR * solid.bbox_diagonal

    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    total = 0
    drawn = 0
    while total < n:
        if drawn >= RETRY_FACTOR * n:
            raise EmptySolidError(
                f"boundary sampling stalled: {total}/{n} points after {drawn} draws"
            )
        batch = n
        drawn += batch
        tri = rng.choice(len(a), size=batch, p=weights)
        u = rng.random(batch)
        v = rng.random(batch)
        flip = u + v > 1.0
        u[flip] = 1.0 - u[flip]
        v[flip] = 1.0 - v[flip]
        pts = a[tri] + u[:, None] * (b[tri] - a[tri]) + v[:, None] * (c[tri] - a[tri])
        nrm = normals[tri]
        outside = membership_many(solid, pts + eps * nrm)
        inside = membership_many(solid, pts - eps * nrm)
        good = outside != inside
        if good.any():
            kept.append(pts[good])
            total += int(good.sum())
    return np.concatenate(kept, axis=0)[:n]
