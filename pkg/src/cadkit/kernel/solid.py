"""Extruded-profile solids with boolean membership semantics.

A Solid is the ordered CSG program implied by the model: each (part, face)
pair contributes one extruded primitive, folded left to right with the
part's boolean operation. Membership queries are total functions evaluated
against this program; no boundary representation is ever built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import CadKitError, GeometryError
from ..model import CadSequence, Operation
from .profile import DEFAULT_TESSELLATION_TOL, Profile2D, tessellate_profile

_MEMBERSHIP_CHUNK = 65536


def euler_to_matrix(angles_deg) -> np.ndarray:
    """Rotation about X by a1, then Y by a2, then Z by a3 (degrees).

    This is the single place the Euler convention lives; world = R @ local.
    """
    a1, a2, a3 = (math.radians(a) for a in angles_deg)
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    c3, s3 = math.cos(a3), math.sin(a3)
    rx = np.array([[1, 0, 0], [0, c1, -s1], [0, s1, c1]])
    ry = np.array([[c2, 0, s2], [0, 1, 0], [-s2, 0, c2]])
    rz = np.array([[c3, -s3, 0], [s3, c3, 0], [0, 0, 1]])
    return rz @ ry @ rx


@dataclass(frozen=True)
class ExtrudedPrimitive:
    """One profile extruded along local z, rigidly placed in the world."""

    profile: Profile2D  # coordinates already multiplied by sketch_scale
    z_min: float
    z_max: float
    rotation: np.ndarray  # (3, 3) world = rotation @ local + translation
    translation: np.ndarray  # (3,)
    operation: Operation

    def __post_init__(self):
        self.rotation.setflags(write=False)
        self.translation.setflags(write=False)
        if not self.z_max - self.z_min > 0.0:
            raise GeometryError("extrusion", "zero-thickness extrusion")

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return (points - self.translation) @ self.rotation

    def to_world(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    def contains(self, points: np.ndarray) -> np.ndarray:
        local = self.to_local(points)
        hit = (local[:, 2] >= self.z_min) & (local[:, 2] <= self.z_max)
        if hit.any():
            hit[hit] = self.profile.contains(local[hit, :2])
        return hit

    def local_bbox_corners(self) -> np.ndarray:
        lo, hi = self.profile.bbox
        xs = (lo[0], hi[0])
        ys = (lo[1], hi[1])
        zs = (self.z_min, self.z_max)
        return np.array([(x, y, z) for x in xs for y in ys for z in zs])


@dataclass(frozen=True)
class Solid:
    primitives: tuple[ExtrudedPrimitive, ...]
    bbox_min: np.ndarray
    bbox_max: np.ndarray

    def __post_init__(self):
        self.bbox_min.setflags(write=False)
        self.bbox_max.setflags(write=False)

    @property
    def bbox_diagonal(self) -> float:
        return float(np.linalg.norm(self.bbox_max - self.bbox_min))


def build_solid(
    seq: CadSequence,
    tol: float = DEFAULT_TESSELLATION_TOL,
    center_circles: bool = False,
) -> Solid:
    """Tessellate and place one primitive per (part, face), in model order."""
    primitives: list[ExtrudedPrimitive] = []
    for pi, part in enumerate(seq.parts, 1):
        if pi == 1 and part.extrusion.operation is not Operation.NEW_BODY:
            raise GeometryError("part_1", "first part must start a new body")
        rotation = euler_to_matrix(part.euler_angles)
        translation = np.asarray(part.translation, dtype=float)
        ext = part.extrusion
        if not part.sketch.faces:
            raise GeometryError(f"part_{pi}.sketch", "no faces")
        for fi, face in enumerate(part.sketch.faces, 1):
            try:
                profile = tessellate_profile(
                    face,
                    ext.sketch_scale,
                    tol=tol,
                    center_circles=center_circles,
                    path=f"part_{pi}.sketch.face_{fi}",
                )
            except CadKitError:
                raise
            primitives.append(
                ExtrudedPrimitive(
                    profile=profile,
                    z_min=-ext.depth_opposite,
                    z_max=ext.depth_towards,
                    rotation=rotation,
                    translation=translation,
                    operation=ext.operation,
                )
            )
    corners = np.vstack([p.to_world(p.local_bbox_corners()) for p in primitives])
    return Solid(
        primitives=tuple(primitives),
        bbox_min=corners.min(axis=0),
        bbox_max=corners.max(axis=0),
    )


def membership_many(solid: Solid, points: np.ndarray) -> np.ndarray:
    """Vectorized point-in-solid for an (n, 3) array of finite points."""
    points = np.asarray(points, dtype=float)
    out = np.empty(len(points), dtype=bool)
    for start in range(0, len(points), _MEMBERSHIP_CHUNK):
        chunk = points[start : start + _MEMBERSHIP_CHUNK]
        acc = np.zeros(len(chunk), dtype=bool)
        for prim in solid.primitives:
            inside = prim.contains(chunk)
            if prim.operation in (Operation.NEW_BODY, Operation.JOIN):
                acc |= inside
            elif prim.operation is Operation.CUT:
                acc &= ~inside
            else:
                acc &= inside
        out[start : start + _MEMBERSHIP_CHUNK] = acc
    return out


def membership(solid: Solid, point) -> bool:
    return bool(membership_many(solid, np.asarray([point], dtype=float))[0])
