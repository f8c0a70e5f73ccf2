"""Orthographic depth-shaded silhouette rasterizer.

Replaces an external renderer for shape judging: meshes are normalized,
viewed from a configurable azimuth/elevation, and rasterized with a
z-buffer. Pure numpy; identical inputs yield byte-identical images.
"""

from __future__ import annotations

import io
import math

import numpy as np

from ..errors import EmptyMeshError
from ..kernel.mesh import TriangleMesh
from ..metrics.meshops import normalize_for_cd

DEFAULT_AZIMUTH = 45.0
DEFAULT_ELEVATION = 35.0
DEFAULT_SIZE = 256
_VIEW_HALF_WIDTH = 0.9  # normalized mesh fits in a ball of radius sqrt(3)/2


def render_silhouette(
    mesh: TriangleMesh,
    azimuth: float = DEFAULT_AZIMUTH,
    elevation: float = DEFAULT_ELEVATION,
    size: int = DEFAULT_SIZE,
) -> np.ndarray:
    """Grayscale (size, size) uint8 image; 0 is background, brighter is nearer."""
    if mesh.triangle_count == 0:
        raise EmptyMeshError("cannot render an empty mesh")
    if size < 8:
        raise ValueError("size must be at least 8 pixels")
    mesh = normalize_for_cd(mesh)

    az = math.radians(azimuth)
    el = math.radians(elevation)
    view_dir = np.array(
        [math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)]
    )
    right = np.array([-math.sin(az), math.cos(az), 0.0])
    up = np.cross(view_dir, right)

    verts = mesh.vertices
    px = (verts @ right + _VIEW_HALF_WIDTH) / (2 * _VIEW_HALF_WIDTH) * (size - 1)
    py = (verts @ up + _VIEW_HALF_WIDTH) / (2 * _VIEW_HALF_WIDTH) * (size - 1)
    depth = verts @ view_dir  # larger is nearer to the camera

    zbuf = np.full((size, size), -np.inf)
    tris = mesh.triangles
    for t in range(len(tris)):
        i0, i1, i2 = tris[t]
        xs = np.array([px[i0], px[i1], px[i2]])
        ys = np.array([py[i0], py[i1], py[i2]])
        zs = np.array([depth[i0], depth[i1], depth[i2]])
        x_lo = max(int(math.floor(xs.min())), 0)
        x_hi = min(int(math.ceil(xs.max())), size - 1)
        y_lo = max(int(math.floor(ys.min())), 0)
        y_hi = min(int(math.ceil(ys.max())), size - 1)
        if x_lo > x_hi or y_lo > y_hi:
            continue
        denom = (ys[1] - ys[2]) * (xs[0] - xs[2]) + (xs[2] - xs[1]) * (ys[0] - ys[2])
        if abs(denom) < 1e-12:
            continue
        gx, gy = np.meshgrid(
            np.arange(x_lo, x_hi + 1), np.arange(y_lo, y_hi + 1), indexing="ij"
        )
        w0 = ((ys[1] - ys[2]) * (gx - xs[2]) + (xs[2] - xs[1]) * (gy - ys[2])) / denom
        w1 = ((ys[2] - ys[0]) * (gx - xs[2]) + (xs[0] - xs[2]) * (gy - ys[2])) / denom
        w2 = 1.0 - w0 - w1
        cover = (w0 >= 0.0) & (w1 >= 0.0) & (w2 >= 0.0)
        if not cover.any():
            continue
        z = w0 * zs[0] + w1 * zs[1] + w2 * zs[2]
        patch = zbuf[x_lo : x_hi + 1, y_lo : y_hi + 1]
        update = cover & (z > patch)
        patch[update] = z[update]

    image = np.zeros((size, size), dtype=np.uint8)
    hit = np.isfinite(zbuf)
    if hit.any():
        z = zbuf[hit]
        lo, hi = float(z.min()), float(z.max())
        span = hi - lo if hi > lo else 1.0
        image[hit] = (64 + 191 * (z - lo) / span).astype(np.uint8)
    # flip so +up points to the top row of the image
    return image.T[::-1].copy()


def image_to_png(image: np.ndarray) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(image, mode="L").save(buf, format="PNG")
    return buf.getvalue()
