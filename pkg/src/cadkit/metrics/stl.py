"""STL reading and writing, binary and ASCII.

Binary layout is the de-facto standard: 80-byte header (ignored on read,
zeroed on write), little-endian u32 triangle count, then 50-byte records of
normal + three vertices (f32) + u16 attribute. ASCII files start with
"solid".
"""

from __future__ import annotations

import re
import struct
import warnings

import numpy as np

from ..errors import StlFormatError
from ..kernel.mesh import TriangleMesh

DEDUP_DECIMALS = 9  # vertices closer than 1e-9 merge on load
_RECORD = struct.Struct("<12fH")


def load_stl(data: bytes) -> TriangleMesh:
    """Parse binary or ASCII STL bytes into an indexed mesh.

    Vertices are deduplicated within 1e-9 and degenerate (zero-area)
    triangles are dropped with a warning carrying the count.
    """
    if _looks_ascii(data):
        soup = _parse_ascii(data)
    else:
        soup = _parse_binary(data)
    if len(soup) == 0:
        raise StlFormatError("no triangles")
    return _index_soup(soup)


def save_stl(mesh: TriangleMesh, format: str = "binary") -> bytes:
    """Serialize a mesh; load_stl(save_stl(m)) preserves the triangle set."""
    a, b, c = mesh.corners()
    if format == "binary":
        out = bytearray(80)
        out += struct.pack("<I", mesh.triangle_count)
        for i in range(mesh.triangle_count):
            out += _RECORD.pack(*mesh.normals[i], *a[i], *b[i], *c[i], 0)
        return bytes(out)
    if format == "ascii":
        lines = ["solid mesh"]
        for i in range(mesh.triangle_count):
            nx, ny, nz = mesh.normals[i]
            lines.append(f"  facet normal {_f(nx)} {_f(ny)} {_f(nz)}")
            lines.append("    outer loop")
            for v in (a[i], b[i], c[i]):
                lines.append(f"      vertex {_f(v[0])} {_f(v[1])} {_f(v[2])}")
            lines.append("    endloop")
            lines.append("  endfacet")
        lines.append("endsolid mesh")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown STL format {format!r}")


def _f(x: float) -> str:
    return f"{float(x):.9g}"  # 9 significant digits round-trip an f32 exactly


def _looks_ascii(data: bytes) -> bool:
    return data[:5] == b"solid" and b"facet" in data[:2048]


def _parse_binary(data: bytes) -> np.ndarray:
    if len(data) < 84:
        raise StlFormatError("binary STL shorter than header + count")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        raise StlFormatError(
            f"declared {count} triangles but payload holds "
            f"{(len(data) - 84) // 50} complete records"
        )
    if len(data) > expected:
        raise StlFormatError(f"{len(data) - expected} trailing bytes after {count} records")
    soup = np.empty((count, 3, 3), dtype=np.float64)
    for i in range(count):
        rec = _RECORD.unpack_from(data, 84 + 50 * i)
        soup[i] = np.asarray(rec[3:12], dtype=np.float64).reshape(3, 3)
    return soup


_VERTEX_RE = re.compile(
    rb"vertex\s+([^\s]+)\s+([^\s]+)\s+([^\s]+)", re.IGNORECASE
)


def _parse_ascii(data: bytes) -> np.ndarray:
    facets = data.lower().count(b"facet normal")
    coords = _VERTEX_RE.findall(data)
    if len(coords) % 3 != 0:
        raise StlFormatError(f"ASCII STL has {len(coords)} vertices, not a multiple of 3")
    if facets and facets * 3 != len(coords):
        raise StlFormatError(
            f"ASCII STL declares {facets} facets but holds {len(coords) // 3} triangles"
        )
    try:
        flat = np.asarray([[float(x) for x in v] for v in coords], dtype=np.float64)
    except ValueError as exc:
        raise StlFormatError(f"bad vertex literal: {exc}") from exc
    return flat.reshape(-1, 3, 3)


def _index_soup(soup: np.ndarray) -> TriangleMesh:
    flat = soup.reshape(-1, 3)
    keys = np.round(flat, DEDUP_DECIMALS)
    # merge to the first representative of each rounded coordinate
    uniq_keys, first_idx, inverse = np.unique(
        keys, axis=0, return_index=True, return_inverse=True
    )
    vertices = flat[first_idx]
    faces = inverse.reshape(-1, 3).astype(np.int32)

    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    cross = np.cross(b - a, c - a)
    norm = np.linalg.norm(cross, axis=1)
    keep = 0.5 * norm > 1e-12
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"dropped {dropped} degenerate triangles", UserWarning)
    faces = faces[keep]
    if len(faces) == 0:
        raise StlFormatError("all triangles degenerate")
    normals = cross[keep] / norm[keep][:, None]
    return TriangleMesh(vertices=vertices, triangles=faces, normals=normals)
