"""Geometry kernel: profiles, extruded solids, CSG membership, meshing."""

from .mesh import (
    TriangleMesh,
    extract_mesh,
    is_watertight,
    mesh_from_soup,
    mesh_volume,
    primitive_surface_triangles,
)
from .profile import DEFAULT_TESSELLATION_TOL, Profile2D, tessellate_profile
from .sample import sample_surface
from .solid import (
    ExtrudedPrimitive,
    Solid,
    build_solid,
    euler_to_matrix,
    membership,
    membership_many,
)
from .triangulate import triangulate_polygon

__all__ = [
    "DEFAULT_TESSELLATION_TOL",
    "ExtrudedPrimitive",
    "Profile2D",
    "Solid",
    "TriangleMesh",
    "build_solid",
    "euler_to_matrix",
    "extract_mesh",
    "is_watertight",
    "membership",
    "membership_many",
    "mesh_from_soup",
    "mesh_volume",
    "primitive_surface_triangles",
    "sample_surface",
    "tessellate_profile",
    "triangulate_polygon",
]
