"""Volumetric IoU over unit-cube occupancy grids.

Each input (solid or mesh) is independently normalized so its min corner
sits at the origin and its longest extent becomes 1, then voxelized at the
given resolution by testing cell centers: CSG membership for solids, +x
parity ray casting for watertight meshes (generalized winding numbers as a
fallback for open meshes).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import NonWatertightWarning, ZeroExtentError
from ..kernel.mesh import TriangleMesh, is_watertight
from ..kernel.solid import Solid, membership_many

DEFAULT_IOU_RESOLUTION = 0.02
# fixed sub-cell ray offsets; irrational-ish so rays never graze an edge
_JITTER_Y = 0.2137186959
_JITTER_Z = 0.3718612793


@dataclass(frozen=True)
class VoxelGrid:
    origin: np.ndarray  # world position of the (0,0,0) cell corner
    resolution: float
    occupancy: np.ndarray  # (nx, ny, nz) bool

    def __post_init__(self):
        self.origin.setflags(write=False)
        self.occupancy.setflags(write=False)

    @property
    def filled(self) -> int:
        return int(self.occupancy.sum())


def occupancy_grid(
    obj, resolution: float = DEFAULT_IOU_RESOLUTION, prenormalized: bool = False
) -> VoxelGrid:
    """Normalize to [0,1]^3 (anchored at the min corner) and voxelize."""
    if resolution <= 0.0 or resolution > 1.0:
        raise ValueError("resolution must be in (0, 1]")
    if prenormalized:
        lo = np.zeros(3)
        extent = 1.0
    else:
        lo, hi = _bounds(obj)
        extent = float((hi - lo).max())
    if extent <= 0.0:
        raise ZeroExtentError("object is degenerate in every axis")
    k = int(np.ceil(1.0 / resolution))
    centers = (np.arange(k) + 0.5) * resolution  # normalized cell centers

    if isinstance(obj, Solid):
        grid = np.stack(np.meshgrid(centers, centers, centers, indexing="ij"), axis=-1)
        world = lo + grid.reshape(-1, 3) * extent  # undo the normalization
        occ = membership_many(obj, world).reshape(k, k, k)
    elif isinstance(obj, TriangleMesh):
        vertices = (obj.vertices - lo) / extent
        norm_mesh = TriangleMesh(
            vertices=vertices, triangles=obj.triangles, normals=obj.normals
        )
        if is_watertight(norm_mesh):
            occ = _raycast_occupancy(norm_mesh, centers, resolution)
        else:
            warnings.warn(
                "mesh is not watertight; falling back to winding-number occupancy",
                NonWatertightWarning,
            )
            occ = _winding_occupancy(norm_mesh, centers)
    else:
        raise TypeError(f"cannot voxelize {type(obj).__name__}")
    return VoxelGrid(origin=lo.copy(), resolution=resolution, occupancy=occ)


def voxel_iou(a, b, resolution: float = DEFAULT_IOU_RESOLUTION, joint_norm: bool = False) -> float:
    """Intersection-over-union of the two occupancy grids (0 if both empty).

    joint_norm normalizes both inputs with one shared transform (the union
    of their bounds) instead of per-input normalization, making the metric
    sensitive to absolute scale differences.
    """
    if joint_norm:
        lo_a, hi_a = _bounds(a)
        lo_b, hi_b = _bounds(b)
        lo = np.minimum(lo_a, lo_b)
        extent = float(np.maximum(hi_a - lo, hi_b - lo).max())
        if extent <= 0.0:
            raise ZeroExtentError("objects are degenerate in every axis")
        grid_a = occupancy_grid(_shift_scale(a, lo, extent), resolution, prenormalized=True)
        grid_b = occupancy_grid(_shift_scale(b, lo, extent), resolution, prenormalized=True)
    else:
        grid_a = occupancy_grid(a, resolution)
        grid_b = occupancy_grid(b, resolution)
    occ_a, occ_b = _pad_to_match(grid_a.occupancy, grid_b.occupancy)
    union = int(np.logical_or(occ_a, occ_b).sum())
    if union == 0:
        return 0.0
    inter = int(np.logical_and(occ_a, occ_b).sum())
    return inter / union


def _bounds(obj) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(obj, Solid):
        return obj.bbox_min.copy(), obj.bbox_max.copy()
    if isinstance(obj, TriangleMesh):
        return obj.bbox()
    raise TypeError(f"cannot voxelize {type(obj).__name__}")


def _shift_scale(obj, lo: np.ndarray, extent: float):
    """Pre-map an object so per-input normalization becomes the joint one."""
    if isinstance(obj, TriangleMesh):
        return TriangleMesh(
            vertices=(obj.vertices - lo) / extent,
            triangles=obj.triangles,
            normals=obj.normals,
        )
    # solids stay solids: wrap by transforming the queried points instead
    raise TypeError("joint normalization currently supports meshes only")


def _pad_to_match(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if a.shape == b.shape:
        return a, b
    shape = np.maximum(a.shape, b.shape)
    out_a = np.zeros(shape, dtype=bool)
    out_b = np.zeros(shape, dtype=bool)
    out_a[: a.shape[0], : a.shape[1], : a.shape[2]] = a
    out_b[: b.shape[0], : b.shape[1], : b.shape[2]] = b
    return out_a, out_b


def _raycast_occupancy(mesh: TriangleMesh, centers: np.ndarray, resolution: float) -> np.ndarray:
    """Parity of +x surface crossings at each cell center (watertight mesh)."""
    k = len(centers)
    a, b, c = mesh.corners()
    occ = np.zeros((k, k, k), dtype=bool)
    jitter_y = _JITTER_Y * resolution * 1e-3
    jitter_z = _JITTER_Z * resolution * 1e-3
    for yi, y in enumerate(centers):
        hits = _ray_hits_x(a, b, c, y + jitter_y, centers + jitter_z)
        for zi, xs in enumerate(hits):
            if len(xs):
                occ[:, yi, zi] = (np.searchsorted(xs, centers, side="left") % 2).astype(bool)
    return occ


def _ray_hits_x(a, b, c, y: float, zs: np.ndarray) -> list[np.ndarray]:
    """For rays along +x at (y, z) for each z, the sorted crossing x's."""
    # 2D point-in-triangle in the yz plane, then interpolate x barycentrically
    ay, az = a[:, 1], a[:, 2]
    by, bz = b[:, 1], b[:, 2]
    cy, cz = c[:, 1], c[:, 2]
    denom = (by - ay) * (cz - az) - (bz - az) * (cy - ay)
    good = np.abs(denom) > 1e-30  # triangles edge-on to the ray never count
    out: list[np.ndarray] = []
    for z in zs:
        w0 = ((by - ay) * (z - az) - (bz - az) * (y - ay)) / np.where(good, denom, 1.0)
        w1 = ((y - ay) * (cz - az) - (z - az) * (cy - ay)) / np.where(good, denom, 1.0)
        # barycentric u along (b - a), v along (c - a)
        u = w1
        v = w0
        hit = good & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0)
        if hit.any():
            x = a[hit, 0] + u[hit] * (b[hit, 0] - a[hit, 0]) + v[hit] * (c[hit, 0] - a[hit, 0])
            out.append(np.sort(x))
        else:
            out.append(np.empty(0))
    return out


def _winding_occupancy(mesh: TriangleMesh, centers: np.ndarray) -> np.ndarray:
    """Generalized winding number > 1/2 marks a cell occupied."""
    k = len(centers)
    pts = np.stack(np.meshgrid(centers, centers, centers, indexing="ij"), axis=-1).reshape(-1, 3)
    a, b, c = mesh.corners()
    occ = np.empty(len(pts), dtype=bool)
    chunk = max(1, int(2e7 // max(1, len(a))))
    for start in range(0, len(pts), chunk):
        p = pts[start : start + chunk]
        occ[start : start + chunk] = _winding_numbers(p, a, b, c) > 0.5
    return occ.reshape(k, k, k)


def _winding_numbers(points: np.ndarray, a, b, c) -> np.ndarray:
    # Van Oosterom & Strackee solid angle, summed over triangles
    pa = a[None, :, :] - points[:, None, :]
    pb = b[None, :, :] - points[:, None, :]
    pc = c[None, :, :] - points[:, None, :]
    la = np.linalg.norm(pa, axis=2)
    lb = np.linalg.norm(pb, axis=2)
    lc = np.linalg.norm(pc, axis=2)
    numer = np.einsum("ptj,ptj->pt", pa, np.cross(pb, pc))
    denom = (
        la * lb * lc
        + np.einsum("ptj,ptj->pt", pa, pb) * lc
        + np.einsum("ptj,ptj->pt", pb, pc) * la
        + np.einsum("ptj,ptj->pt", pc, pa) * lb
    )
    omega = 2.0 * np.arctan2(numer, denom)
    return omega.sum(axis=1) / (4.0 * np.pi)
