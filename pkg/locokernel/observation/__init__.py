"""Observation assembly: heightmap, footmap and proprioception."""

from locokernel.observation.footmap import Footmap, build_footmap
from locokernel.observation.frame import ObservationFrame, build_frame, read_frame, write_frame
from locokernel.observation.heightmap import (
    GRID_SHAPE,
    NUM_CELLS,
    HeightmapDrift,
    HeightmapGrid,
    cell_coords_3d,
    draw_drift,
    grid_offsets,
    heightmap_drift,
    sample_heightmap,
)
from locokernel.observation.proprio import PROPRIO_DIM, PROPRIO_SLICES, assemble_proprio
from locokernel.observation.state import RobotState, feet_in_base_frame

__all__ = [
    "Footmap",
    "GRID_SHAPE",
    "HeightmapDrift",
    "HeightmapGrid",
    "NUM_CELLS",
    "ObservationFrame",
    "PROPRIO_DIM",
    "PROPRIO_SLICES",
    "RobotState",
    "assemble_proprio",
    "build_footmap",
    "build_frame",
    "cell_coords_3d",
    "draw_drift",
    "feet_in_base_frame",
    "grid_offsets",
    "heightmap_drift",
    "read_frame",
    "sample_heightmap",
    "write_frame",
]
