"""Minimal stand-in for the CadQuery API surface that emitted scripts use.

Installed on PYTHONPATH by tests when the real CadQuery runtime is not
available. Implements chained workplanes, extrusion, rigid motions, union,
and binary STL export with its own geometry code (no toolkit imports), so
executed scripts can be compared against the kernel as an independent
path. Degenerate three-point arcs raise the same failure message as the
OpenCascade kernel.
"""

from __future__ import annotations

import math
import struct

import numpy as np

ARC_SEGMENTS = 48
CIRCLE_SEGMENTS = 64


class Shape:
    """Triangle soup with rigid motions and concatenation-union."""

    def __init__(self, triangles: np.ndarray):
        self.triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)

    def union(self, other: "Shape") -> "Shape":
        return Shape(np.concatenate([self.triangles, other.triangles], axis=0))

    def cut(self, other: "Shape") -> "Shape":
        raise NotImplementedError("the cadquery test shim does not implement cut()")

    def intersect(self, other: "Shape") -> "Shape":
        raise NotImplementedError("the cadquery test shim does not implement intersect()")

    def rotate(self, axis_start, axis_end, angle_deg: float) -> "Shape":
        origin = np.asarray(axis_start, dtype=float)
        axis = np.asarray(axis_end, dtype=float) - origin
        axis = axis / np.linalg.norm(axis)
        theta = math.radians(angle_deg)
        k = axis
        flat = self.triangles.reshape(-1, 3) - origin
        rotated = (
            flat * math.cos(theta)
            + np.cross(k, flat) * math.sin(theta)
            + np.outer(flat @ k, k) * (1.0 - math.cos(theta))
        )
        return Shape((rotated + origin).reshape(-1, 3, 3))

    def translate(self, vec) -> "Shape":
        return Shape(self.triangles + np.asarray(vec, dtype=float))


class Workplane:
    def __init__(self, plane: str = "XY"):
        if plane != "XY":
            raise NotImplementedError("shim supports the XY workplane only")
        self._wire: list[tuple[float, float]] = []
        self._pending: list[tuple[float, float]] = []
        self._circles: list[tuple[float, float, float]] = []

    def moveTo(self, x: float, y: float) -> "Workplane":
        self._wire = [(float(x), float(y))]
        return self

    def lineTo(self, x: float, y: float) -> "Workplane":
        self._wire.append((float(x), float(y)))
        return self

    def threePointArc(self, mid, end) -> "Workplane":
        if not self._wire:
            raise RuntimeError("threePointArc requires a current point")
        start = np.asarray(self._wire[-1], dtype=float)
        mid = np.asarray(mid, dtype=float)
        end = np.asarray(end, dtype=float)
        span = max(
            np.abs(np.vstack([start, mid, end]).max(axis=0)
                   - np.vstack([start, mid, end]).min(axis=0)).max(),
            1e-300,
        )
        cross = np.cross(mid - start, end - start)
        if abs(cross) <= 1e-9 * span * span:
            raise RuntimeError("Standard_Failure: GC_MakeArcOfCircle::Value() - no result")
        center = _circumcenter(start, mid, end)
        radius = float(np.linalg.norm(start - center))
        a0 = math.atan2(start[1] - center[1], start[0] - center[0])
        a1 = math.atan2(end[1] - center[1], end[0] - center[0])
        if cross > 0:
            sweep = (a1 - a0) % (2.0 * math.pi)
        else:
            sweep = -((a0 - a1) % (2.0 * math.pi))
        for i in range(1, ARC_SEGMENTS + 1):
            theta = a0 + sweep * i / ARC_SEGMENTS
            self._wire.append(
                (center[0] + radius * math.cos(theta), center[1] + radius * math.sin(theta))
            )
        self._wire[-1] = (float(end[0]), float(end[1]))
        return self

    def close(self) -> "Workplane":
        if len(self._wire) > 1 and _close_pts(self._wire[0], self._wire[-1]):
            self._wire.pop()
        return self

    def pushPoints(self, points) -> "Workplane":
        self._pending = [(float(p[0]), float(p[1])) for p in points]
        return self

    def circle(self, radius: float) -> "Workplane":
        centers = self._pending or [(0.0, 0.0)]
        for cx, cy in centers:
            self._circles.append((cx, cy, float(radius)))
        self._pending = []
        return self

    def extrude(self, distance: float) -> Shape:
        z_lo, z_hi = (0.0, float(distance)) if distance >= 0 else (float(distance), 0.0)
        soups = []
        for cx, cy, r in self._circles:
            theta = np.linspace(0.0, 2.0 * math.pi, CIRCLE_SEGMENTS, endpoint=False)
            ring = np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
            soups.append(_prism(ring, z_lo, z_hi))
        if len(self._wire) >= 3:
            soups.append(_prism(np.asarray(self._wire, dtype=float), z_lo, z_hi))
        if not soups:
            raise RuntimeError("nothing to extrude")
        return Shape(np.concatenate(soups, axis=0))


def _close_pts(a, b) -> bool:
    return abs(a[0] - b[0]) < 1e-12 and abs(a[1] - b[1]) < 1e-12


def _circumcenter(a, b, c) -> np.ndarray:
    rows = np.array([[b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]])
    rhs = 0.5 * np.array(
        [rows[0] @ [b[0] + a[0], b[1] + a[1]], rows[1] @ [c[0] + a[0], c[1] + a[1]]]
    )
    return np.linalg.solve(rows, rhs)


def _prism(ring: np.ndarray, z_lo: float, z_hi: float) -> np.ndarray:
    if _signed_area(ring) < 0.0:
        ring = ring[::-1]
    caps = _ear_clip(ring)
    tris = []
    for i, j, k in caps:
        tris.append([( *ring[i], z_hi), (*ring[j], z_hi), (*ring[k], z_hi)])
        tris.append([( *ring[i], z_lo), (*ring[k], z_lo), (*ring[j], z_lo)])
    n = len(ring)
    for i in range(n):
        j = (i + 1) % n
        a = (*ring[i], z_lo)
        b = (*ring[j], z_lo)
        c = (*ring[j], z_hi)
        d = (*ring[i], z_hi)
        tris.append([a, b, c])
        tris.append([a, c, d])
    return np.asarray(tris, dtype=float)


def _signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _ear_clip(ring: np.ndarray) -> list[tuple[int, int, int]]:
    idx = list(range(len(ring)))
    out = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        n = len(idx)
        best = None
        for j in range(n):
            ia, ib, ic = idx[j - 1], idx[j], idx[(j + 1) % n]
            a, b, c = ring[ia], ring[ib], ring[ic]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 1e-14:
                continue
            if any(_in_tri(ring[k], a, b, c) for k in idx if k not in (ia, ib, ic)):
                continue
            best = j
            break
        if best is None:
            best = 0  # numerically stuck; clip anyway
        j = best
        out.append((idx[j - 1], idx[j], idx[(j + 1) % len(idx)]))
        idx.pop(j)
    out.append((idx[0], idx[1], idx[2]))
    return out


def _in_tri(p, a, b, c) -> bool:
    d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
    d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
    eps = 1e-12
    return d1 > eps and d2 > eps and d3 > eps


class _Exporters:
    @staticmethod
    def export(shape: Shape, path: str) -> None:
        tris = shape.triangles
        out = bytearray(80)
        out += struct.pack("<I", len(tris))
        for tri in tris:
            normal = np.cross(tri[1] - tri[0], tri[2] - tri[0])
            length = np.linalg.norm(normal)
            if length > 0:
                normal = normal / length
            out += struct.pack("<12fH", *normal, *tri[0], *tri[1], *tri[2], 0)
        with open(path, "wb") as fh:
            fh.write(bytes(out))


exporters = _Exporters()
