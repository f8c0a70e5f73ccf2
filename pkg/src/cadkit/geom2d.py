"""Planar geometry helpers shared by the codec and the kernel.

All polygons are (n, 2) float arrays of ring vertices without a repeated
closing vertex. Signed area > 0 means counterclockwise.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateArcError

# Relative area threshold below which a three-point arc counts as degenerate:
# |cross| must exceed COLINEAR_REL_TOL * bbox_diag**2 of the three points.
COLINEAR_REL_TOL = 1e-9


def arc_chord_cross(start, mid, end) -> float:
    """Cross product of (mid-start) x (end-start); sign gives arc orientation."""
    sx, sy = start
    mx, my = mid
    ex, ey = end
    return (mx - sx) * (ey - sy) - (my - sy) * (ex - sx)


def arc_bbox_diag_sq(start, mid, end) -> float:
    xs = (start[0], mid[0], end[0])
    ys = (start[1], mid[1], end[1])
    return (max(xs) - min(xs)) ** 2 + (max(ys) - min(ys)) ** 2


def is_degenerate_arc(start, mid, end) -> bool:
    """True when the three points are coincident or (near-)colinear."""
    diag_sq = arc_bbox_diag_sq(start, mid, end)
    if diag_sq == 0.0:
        return True
    return abs(arc_chord_cross(start, mid, end)) <= COLINEAR_REL_TOL * diag_sq


def arc_center_radius(start, mid, end, path: str = "arc"):
    """Circumcenter and radius of the circle through three points.

    Raises DegenerateArcError for coincident or (near-)colinear points.
    """
    if is_degenerate_arc(start, mid, end):
        raise DegenerateArcError(path, "three-point arc is colinear or coincident")
    ax, ay = start
    bx, by = mid
    cx, cy = end
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    radius = math.hypot(ax - ux, ay - uy)
    return (ux, uy), radius


def arc_sweep(start, mid, end, path: str = "arc"):
    """Center, radius, start angle and signed sweep angle of a 3-point arc.

    The sweep is positive for a counterclockwise arc and always walks from
    start to end through mid.
    """
    (cx, cy), radius = arc_center_radius(start, mid, end, path)
    theta_s = math.atan2(start[1] - cy, start[0] - cx)
    theta_e = math.atan2(end[1] - cy, end[0] - cx)
    ccw = arc_chord_cross(start, mid, end) > 0.0
    if ccw:
        sweep = (theta_e - theta_s) % (2.0 * math.pi)
    else:
        sweep = -((theta_s - theta_e) % (2.0 * math.pi))
    if sweep == 0.0:
        sweep = 2.0 * math.pi if ccw else -2.0 * math.pi
    return (cx, cy), radius, theta_s, sweep


def arc_polyline(start, mid, end, segments: int, path: str = "arc") -> np.ndarray:
    """Sample a 3-point arc into `segments` chords, start and end inclusive."""
    (cx, cy), radius, theta_s, sweep = arc_sweep(start, mid, end, path)
    t = np.linspace(0.0, 1.0, segments + 1)
    theta = theta_s + sweep * t
    pts = np.column_stack((cx + radius * np.cos(theta), cy + radius * np.sin(theta)))
    # pin exact endpoints so loop chaining stays closed at float precision
    pts[0] = start
    pts[-1] = end
    return pts


def circle_polyline(center, radius: float, segments: int) -> np.ndarray:
    """Regular polygon approximation of a circle, counterclockwise, closed ring."""
    theta = np.linspace(0.0, 2.0 * math.pi, segments, endpoint=False)
    return np.column_stack(
        (center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta))
    )


def arc_segment_count(start, mid, end, sagitta_tol: float, lo: int = 8, hi: int = 256) -> int:
    """Segments needed so each chord's sagitta stays below sagitta_tol."""
    try:
        _, radius, _, sweep = arc_sweep(start, mid, end)
    except DegenerateArcError:
        raise
    return _segments_for_sagitta(radius, abs(sweep), sagitta_tol, lo, hi)


def circle_segment_count(radius: float, sagitta_tol: float, lo: int = 8, hi: int = 256) -> int:
    return _segments_for_sagitta(radius, 2.0 * math.pi, sagitta_tol, lo, hi)


def _segments_for_sagitta(radius: float, sweep: float, tol: float, lo: int, hi: int) -> int:
    # sagitta of one chord spanning angle a is r * (1 - cos(a / 2))
    if tol <= 0.0 or radius <= 0.0:
        return hi
    ratio = 1.0 - tol / radius
    if ratio <= -1.0 or ratio >= 1.0:
        n = lo
    else:
        max_step = 2.0 * math.acos(ratio)
        n = int(math.ceil(sweep / max_step))
    return max(lo, min(hi, n))


def polygon_area(ring: np.ndarray) -> float:
    """Signed shoelace area; positive for counterclockwise rings."""
    x = ring[:, 0]
    y = ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def point_in_polygon(point, ring: np.ndarray) -> bool:
    """Even-odd crossing test for a single point against one ring."""
    return bool(points_in_polygon(np.asarray([point], dtype=float), ring)[0])


def points_in_polygon(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Vectorized even-odd crossing test: (n, 2) points against one ring."""
    px = points[:, 0][:, None]
    py = points[:, 1][:, None]
    x1 = ring[:, 0][None, :]
    y1 = ring[:, 1][None, :]
    x2 = np.roll(ring[:, 0], -1)[None, :]
    y2 = np.roll(ring[:, 1], -1)[None, :]
    straddles = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at_y = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = straddles & (px < x_at_y)
    return (np.count_nonzero(crossings, axis=1) % 2).astype(bool)


def ring_is_simple(ring: np.ndarray) -> bool:
    """True when no two non-adjacent edges of the ring properly intersect."""
    n = len(ring)
    if n < 3:
        return False
    a = ring
    b = np.roll(ring, -1, axis=0)
    # pairwise orientation tests, vectorized over edge pairs (i, j)
    i_idx, j_idx = np.triu_indices(n, k=2)
    # skip the wrap-around adjacency (first edge vs last edge)
    keep = ~((i_idx == 0) & (j_idx == n - 1))
    i_idx = i_idx[keep]
    j_idx = j_idx[keep]
    if len(i_idx) == 0:
        return True
    p1, p2 = a[i_idx], b[i_idx]
    q1, q2 = a[j_idx], b[j_idx]
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    if bool(proper.any()):
        return False
    # collinear-touch cases: an endpoint lying strictly inside the other edge
    touch = (
        ((d1 == 0) & _on_segment(q1, q2, p1))
        | ((d2 == 0) & _on_segment(q1, q2, p2))
        | ((d3 == 0) & _on_segment(p1, p2, q1))
        | ((d4 == 0) & _on_segment(p1, p2, q2))
    )
    return not bool(touch.any())


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
        c[:, 0] - a[:, 0]
    )


def _on_segment(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    return (
        (p[:, 0] >= np.minimum(a[:, 0], b[:, 0]))
        & (p[:, 0] <= np.maximum(a[:, 0], b[:, 0]))
        & (p[:, 1] >= np.minimum(a[:, 1], b[:, 1]))
        & (p[:, 1] <= np.maximum(a[:, 1], b[:, 1]))
    )
