"""Polygon triangulation: hole bridging plus ear clipping.

Holes are spliced into the outer ring through bridge edges (rightmost hole
vertex to a visible outer vertex), then the resulting single ring is ear
clipped. Output triangles keep the outer ring's counterclockwise winding,
and boundary edges of the input rings are never split, which keeps
extruded shells watertight.
"""

from __future__ import annotations

import numpy as np

from ..errors import TriangulationError


def triangulate_polygon(outer: np.ndarray, holes=()) -> tuple[np.ndarray, np.ndarray]:
    """Triangulate outer-minus-holes.

    outer must wind counterclockwise and holes clockwise (the Profile2D
    convention). Returns (vertices (n, 2), triangles (m, 3) int indices).
    """
    ring = [tuple(p) for p in np.asarray(outer, dtype=float)]
    for hole in sorted(holes, key=lambda h: -float(np.max(np.asarray(h)[:, 0]))):
        ring = _splice_hole(ring, [tuple(p) for p in np.asarray(hole, dtype=float)])
    vertices = np.asarray(ring, dtype=float)
    triangles = _ear_clip(vertices)
    return vertices, triangles


def _splice_hole(ring: list, hole: list) -> list:
    """Bridge the hole's rightmost vertex to a mutually visible ring vertex."""
    m_idx = max(range(len(hole)), key=lambda i: (hole[i][0], hole[i][1]))
    mx, my = hole[m_idx]

    # closest intersection of the +x ray from M with the ring
    best_t = np.inf
    best_edge = -1
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if (y1 > my) == (y2 > my):
            continue
        t = x1 + (my - y1) * (x2 - x1) / (y2 - y1)
        if t >= mx - 1e-12 and t < best_t:
            best_t = t
            best_edge = i
    if best_edge < 0:
        raise TriangulationError("hole is not enclosed by the outer boundary")

    i1, i2 = best_edge, (best_edge + 1) % n
    # candidate visible vertex: the intersected edge's endpoint right of M
    cand = i1 if ring[i1][0] > ring[i2][0] else i2
    hit = (best_t, my)

    # reflex ring vertices inside triangle (M, hit, candidate) occlude the
    # bridge; take the occluder with the smallest angle to +x, then distance
    tri = np.asarray([(mx, my), hit, ring[cand]], dtype=float)
    pts = np.asarray(ring, dtype=float)
    inside = _strictly_in_triangle(pts, tri)
    best = cand
    best_key = None
    for i in np.flatnonzero(inside):
        if not _is_reflex(ring, int(i)):
            continue
        dx = ring[i][0] - mx
        dy = ring[i][1] - my
        key = (abs(np.arctan2(dy, dx)), dx * dx + dy * dy)
        if best_key is None or key < best_key:
            best_key = key
            best = int(i)

    hole_cycle = hole[m_idx:] + hole[:m_idx]  # starts at M, keeps CW order
    return ring[: best + 1] + hole_cycle + [hole[m_idx], ring[best]] + ring[best + 1 :]


def _is_reflex(ring: list, i: int) -> bool:
    n = len(ring)
    return _cross(ring[i - 1], ring[i], ring[(i + 1) % n]) < 0.0


def _cross(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _strictly_in_triangle(pts: np.ndarray, tri: np.ndarray) -> np.ndarray:
    d1 = _cross_arr(tri[0], tri[1], pts)
    d2 = _cross_arr(tri[1], tri[2], pts)
    d3 = _cross_arr(tri[2], tri[0], pts)
    eps = 1e-12
    return ((d1 > eps) & (d2 > eps) & (d3 > eps)) | ((d1 < -eps) & (d2 < -eps) & (d3 < -eps))


def _cross_arr(a, b, pts: np.ndarray) -> np.ndarray:
    return (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])


def _blocked(tri: np.ndarray, pts: np.ndarray) -> bool:
    """An ear is blocked by a point strictly inside it or on an open edge.

    Points that coincide with an ear corner (bridge duplicates) never block.
    """
    if len(pts) == 0:
        return False
    if _strictly_in_triangle(pts, tri).any():
        return True
    for s, e in ((0, 1), (1, 2), (2, 0)):
        a, b = tri[s], tri[e]
        ab = b - a
        len_sq = float(ab @ ab)
        if len_sq < 1e-24:
            continue
        cr = _cross_arr(a, b, pts)
        t = (pts - a) @ ab
        on_open_edge = (np.abs(cr) <= 1e-14) & (t > 1e-12 * len_sq) & (t < (1.0 - 1e-12) * len_sq)
        if on_open_edge.any():
            return True
    return False


def _ear_clip(vertices: np.ndarray) -> np.ndarray:
    if len(vertices) < 3:
        raise TriangulationError("fewer than 3 vertices")
    idx = list(range(len(vertices)))
    triangles: list[tuple[int, int, int]] = []

    while len(idx) > 3:
        m = len(idx)
        crosses = [
            _cross(vertices[idx[j - 1]], vertices[idx[j]], vertices[idx[(j + 1) % m]])
            for j in range(m)
        ]
        # reflex AND collinear corners can both sit inside or on a candidate
        # ear; leaving collinear ones out creates T-junctions on cap edges
        blockers = [j for j in range(m) if crosses[j] < 1e-14]
        reflex_pts = (
            vertices[[idx[j] for j in blockers]] if blockers else np.empty((0, 2))
        )
        clipped = False
        for j in range(m):
            if crosses[j] <= 1e-14:
                continue
            ia, ib, ic = idx[j - 1], idx[j], idx[(j + 1) % m]
            if _blocked(vertices[[ia, ib, ic]], reflex_pts):
                continue
            triangles.append((ia, ib, ic))
            idx.pop(j)
            clipped = True
            break
        if not clipped:
            # numerically stuck (collinear runs): drop the flattest corner
            j = min(range(m), key=lambda j: abs(crosses[j]))
            if crosses[j] < -1e-12:
                raise TriangulationError("no ear found; polygon may self-intersect")
            triangles.append((idx[j - 1], idx[j], idx[(j + 1) % m]))
            idx.pop(j)
    triangles.append((idx[0], idx[1], idx[2]))

    tris = np.asarray(triangles, dtype=np.int32)
    a = vertices[tris[:, 0]]
    b = vertices[tris[:, 1]]
    c = vertices[tris[:, 2]]
    area2 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    return tris[np.abs(area2) > 1e-14]
