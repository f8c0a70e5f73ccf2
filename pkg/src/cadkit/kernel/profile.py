"""Sketch faces to tessellated planar profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import geom2d
from ..errors import GeometryError, SelfIntersectionError
from ..model import Arc, Circle, Face, Line, Loop

DEFAULT_TESSELLATION_TOL = 1e-3  # sagitta limit as a fraction of loop bbox diagonal
MIN_ARC_SEGMENTS = 8
MAX_ARC_SEGMENTS = 256


@dataclass(frozen=True)
class Profile2D:
    """Closed outer ring (counterclockwise) with optional hole rings (clockwise)."""

    outer: np.ndarray
    holes: tuple[np.ndarray, ...]
    tol: float

    def __post_init__(self):
        self.outer.setflags(write=False)
        for hole in self.holes:
            hole.setflags(write=False)

    @property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.outer.min(axis=0), self.outer.max(axis=0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Even-odd membership of (n, 2) points in outer minus holes."""
        inside = geom2d.points_in_polygon(points, self.outer)
        for hole in self.holes:
            inside ^= geom2d.points_in_polygon(points, hole)
        return inside


def tessellate_profile(
    face: Face,
    sketch_scale: float,
    tol: float = DEFAULT_TESSELLATION_TOL,
    center_circles: bool = False,
    path: str = "face",
) -> Profile2D:
    """Polygonize one face: arcs and circles become chords with sagitta at
    most tol * (loop bbox diagonal), 8..256 segments per curve; every
    coordinate (and circle radius) is multiplied by sketch_scale.

    center_circles reproduces the centered-circle convention of the
    reference translations: circle centers are replaced by the origin.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    rings = []
    for li, loop in enumerate(face.loops, 1):
        ring = _loop_ring(loop, sketch_scale, tol, center_circles, f"{path}.loop_{li}")
        rings.append(ring)

    outer = rings[0]
    if geom2d.polygon_area(outer) < 0.0:
        outer = outer[::-1].copy()
    if not geom2d.ring_is_simple(outer):
        raise SelfIntersectionError(f"{path}.loop_1", "outer boundary intersects itself")

    holes = []
    for hi, ring in enumerate(rings[1:], 2):
        if geom2d.polygon_area(ring) > 0.0:
            ring = ring[::-1].copy()
        if not geom2d.ring_is_simple(ring):
            raise SelfIntersectionError(f"{path}.loop_{hi}", "hole intersects itself")
        if not geom2d.points_in_polygon(ring, outer).all():
            raise GeometryError(f"{path}.loop_{hi}", "hole lies outside the outer boundary")
        holes.append(ring)
    return Profile2D(outer=outer, holes=tuple(holes), tol=tol)


def _loop_ring(
    loop: Loop, scale: float, tol: float, center_circles: bool, path: str
) -> np.ndarray:
    if loop.is_circle():
        circle = loop.curves[0]
        assert isinstance(circle, Circle)
        center = (0.0, 0.0) if center_circles else (circle.center[0] * scale, circle.center[1] * scale)
        radius = circle.radius * scale
        sagitta = tol * (2.0 * np.sqrt(2.0) * radius)  # bbox diagonal of the circle
        n = geom2d.circle_segment_count(radius, sagitta, MIN_ARC_SEGMENTS, MAX_ARC_SEGMENTS)
        return geom2d.circle_polyline(center, radius, n)

    scaled = []
    for curve in loop.curves:
        if isinstance(curve, Line):
            scaled.append(Line(start=_scl(curve.start, scale), end=_scl(curve.end, scale)))
        elif isinstance(curve, Arc):
            scaled.append(
                Arc(start=_scl(curve.start, scale), mid=_scl(curve.mid, scale), end=_scl(curve.end, scale))
            )
        else:
            raise GeometryError(path, "circle mixed into a curve chain")
    diag = _chain_bbox_diag(scaled)
    sagitta = tol * diag
    points: list = []
    for ci, curve in enumerate(scaled, 1):
        if isinstance(curve, Line):
            points.append(curve.start)
        else:
            n = geom2d.arc_segment_count(
                curve.start, curve.mid, curve.end, sagitta, MIN_ARC_SEGMENTS, MAX_ARC_SEGMENTS
            )
            pts = geom2d.arc_polyline(
                curve.start, curve.mid, curve.end, n, f"{path}.curve_{ci}"
            )
            points.extend(map(tuple, pts[:-1]))  # next curve supplies the endpoint
    ring = np.asarray(points, dtype=float)
    keep = np.ones(len(ring), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(ring, axis=0), axis=1) > 1e-12
    ring = ring[keep]
    if len(ring) < 3:
        raise GeometryError(path, "loop collapses to fewer than 3 vertices")
    return ring


def _scl(p, scale: float):
    return (p[0] * scale, p[1] * scale)


def _chain_bbox_diag(curves) -> float:
    xs: list[float] = []
    ys: list[float] = []
    for c in curves:
        pts = (c.start, c.mid, c.end) if isinstance(c, Arc) else (c.start, c.end)
        for p in pts:
            xs.append(p[0])
            ys.append(p[1])
    return float(np.hypot(max(xs) - min(xs), max(ys) - min(ys)))
