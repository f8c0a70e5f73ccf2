"""Mesh-level helpers for the evaluation metrics."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyMeshError, ZeroExtentError
from ..kernel.mesh import TriangleMesh


def normalize_for_cd(mesh: TriangleMesh) -> TriangleMesh:
    """Center the bbox at the origin and scale the longest edge to 1."""
    if mesh.triangle_count == 0:
        raise EmptyMeshError("cannot normalize an empty mesh")
    lo, hi = mesh.bbox()
    extent = float((hi - lo).max())
    if extent <= 0.0:
        raise ZeroExtentError("mesh is degenerate in every axis")
    center = (lo + hi) / 2.0
    vertices = (mesh.vertices - center) / extent
    return TriangleMesh(vertices=vertices, triangles=mesh.triangles, normals=mesh.normals)


def sample_mesh_surface(mesh: TriangleMesh, n: int, seed: int) -> np.ndarray:
    """Area-weighted uniform points on a mesh surface, (n, 3)."""
    if mesh.triangle_count == 0:
        raise EmptyMeshError("cannot sample an empty mesh")
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c = mesh.corners()
    areas = mesh.areas()
    total = areas.sum()
    if total <= 0.0:
        raise ZeroExtentError("mesh has zero surface area")
    rng = np.random.default_rng(seed)
    tri = rng.choice(mesh.triangle_count, size=n, p=areas / total)
    u = rng.random(n)
    v = rng.random(n)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    return a[tri] + u[:, None] * (b[tri] - a[tri]) + v[:, None] * (c[tri] - a[tri])
