"""Shape evaluation: STL I/O, Chamfer Distance, F1, volumetric IoU, IR."""

from .meshops import normalize_for_cd, sample_mesh_surface
from .pointcloud import DEFAULT_F1_TAU, PointCloud, chamfer, f1_score, nearest_squared
from .report import (
    AggregateMetrics,
    MetricsReport,
    SampleMetrics,
    aggregate,
    invalid_rate,
)
from .stl import load_stl, save_stl
from .voxel import DEFAULT_IOU_RESOLUTION, VoxelGrid, occupancy_grid, voxel_iou

__all__ = [
    "DEFAULT_F1_TAU",
    "DEFAULT_IOU_RESOLUTION",
    "AggregateMetrics",
    "MetricsReport",
    "PointCloud",
    "SampleMetrics",
    "VoxelGrid",
    "aggregate",
    "chamfer",
    "f1_score",
    "invalid_rate",
    "load_stl",
    "nearest_squared",
    "normalize_for_cd",
    "occupancy_grid",
    "sample_mesh_surface",
    "save_stl",
    "voxel_iou",
]
