"""Triangle meshes and mesh extraction from solids."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConservativeMeshWarning, EmptySolidError
from ..model import Operation
from .solid import ExtrudedPrimitive, Solid, membership_many
from .triangulate import triangulate_polygon

DEGENERATE_AREA_TOL = 1e-12


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (n, 3) float64
    triangles: np.ndarray  # (m, 3) int32
    normals: np.ndarray  # (m, 3) unit, right-hand winding

    def __post_init__(self):
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        self.normals.setflags(write=False)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.vertices[self.triangles[:, 0]],
            self.vertices[self.triangles[:, 1]],
            self.vertices[self.triangles[:, 2]],
        )

    def areas(self) -> np.ndarray:
        a, b, c = self.corners()
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def mesh_from_soup(triangles_xyz: np.ndarray) -> TriangleMesh:
    """Build an indexed mesh from an (m, 3, 3) corner array.

    Exactly coincident corners merge into shared vertices; triangles with
    area below 1e-12 are dropped.
    """
    tri = np.asarray(triangles_xyz, dtype=np.float64)
    flat = tri.reshape(-1, 3)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    faces = inverse.reshape(-1, 3).astype(np.int32)
    a = uniq[faces[:, 0]]
    b = uniq[faces[:, 1]]
    c = uniq[faces[:, 2]]
    cross = np.cross(b - a, c - a)
    norm = np.linalg.norm(cross, axis=1)
    keep = 0.5 * norm > DEGENERATE_AREA_TOL
    faces = faces[keep]
    normals = cross[keep] / norm[keep][:, None]
    return TriangleMesh(vertices=uniq, triangles=faces, normals=normals)


def mesh_volume(mesh: TriangleMesh) -> float:
    """Signed volume via the divergence theorem (outward normals positive)."""
    a, b, c = mesh.corners()
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def is_watertight(mesh: TriangleMesh) -> bool:
    """Every undirected edge is shared by exactly two triangles."""
    if mesh.triangle_count == 0:
        return False
    t = mesh.triangles
    edges = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool((counts == 2).all())


def primitive_surface_triangles(prim: ExtrudedPrimitive) -> np.ndarray:
    """World-space (m, 3, 3) boundary triangles of one extruded primitive:
    triangulated caps plus side-wall quads split along the diagonal."""
    soup: list[np.ndarray] = []
    verts2d, cap_tris = triangulate_polygon(prim.profile.outer, prim.profile.holes)

    def lift(ring2d: np.ndarray, z: float) -> np.ndarray:
        return np.column_stack([ring2d, np.full(len(ring2d), z)])

    top = lift(verts2d, prim.z_max)
    bottom = lift(verts2d, prim.z_min)
    soup.append(top[cap_tris])  # CCW in xy -> +z normal
    soup.append(bottom[cap_tris[:, ::-1]])  # reversed -> -z normal

    for ring in (prim.profile.outer, *prim.profile.holes):
        lo = lift(ring, prim.z_min)
        hi = lift(ring, prim.z_max)
        lo_next = np.roll(lo, -1, axis=0)
        hi_next = np.roll(hi, -1, axis=0)
        soup.append(np.stack([lo, lo_next, hi_next], axis=1))
        soup.append(np.stack([lo, hi_next, hi], axis=1))

    local = np.concatenate(soup, axis=0)
    flat = prim.to_world(local.reshape(-1, 3))
    return flat.reshape(-1, 3, 3)


def extract_mesh(
    solid: Solid, mode: str = "per-primitive", resolution: float = 0.02
) -> TriangleMesh:
    """Triangle mesh of a solid.

    per-primitive concatenates each primitive's shell: exact for NewBody and
    Join of disjoint bodies, conservative (overlapping shells, cut material
    still meshed) otherwise. voxel-surface runs marching cubes over the
    membership field at the given cell size and honors every boolean.
    """
    if mode == "per-primitive":
        if any(p.operation in (Operation.CUT, Operation.INTERSECT) for p in solid.primitives):
            warnings.warn(
                "per-primitive meshing of a Cut/Intersect solid keeps every shell; "
                "use voxel-surface for boolean-accurate geometry",
                ConservativeMeshWarning,
            )
        soup = np.concatenate(
            [primitive_surface_triangles(p) for p in solid.primitives], axis=0
        )
        return mesh_from_soup(soup)
    if mode == "voxel-surface":
        return _marching_cubes_mesh(solid, resolution)
    raise ValueError(f"unknown mesh mode {mode!r}")


def _marching_cubes_mesh(solid: Solid, resolution: float) -> TriangleMesh:
    from skimage.measure import marching_cubes

    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    lo = solid.bbox_min - resolution
    hi = solid.bbox_max + resolution
    dims = np.maximum(np.ceil((hi - lo) / resolution).astype(int) + 1, 2)
    axes = [lo[k] + resolution * np.arange(dims[k]) for k in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    occ = membership_many(solid, grid).reshape(dims).astype(np.float64)
    if not occ.any():
        raise EmptySolidError("membership is empty everywhere; nothing to mesh")
    verts, faces, _, _ = marching_cubes(occ, level=0.5, spacing=(resolution,) * 3)
    verts = verts + lo
    soup = verts[faces]
    return mesh_from_soup(soup)
