"""Robot-centric 17x11 heightmap sampled around the base."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, ObservationConfig
from locokernel.errors import InvalidArgumentError, ShapeError
from locokernel.observation.state import RobotState
from locokernel.terrain.heightfield import Heightfield
from locokernel.util.geom import base_to_world_xy

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

GRID_ROWS = 17
GRID_COLS = 11
GRID_SHAPE = (GRID_ROWS, GRID_COLS)
NUM_CELLS = GRID_ROWS * GRID_COLS


def grid_offsets(config: ObservationConfig = DEFAULT_CONFIG.observation) -> FloatArray:
    """Base-frame xy of every sample cell, shape (17, 11, 2); rows run along base x."""
    xs = (np.arange(config.rows) - (config.rows - 1) // 2) * config.pitch
    ys = (np.arange(config.cols) - (config.cols - 1) // 2) * config.pitch
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True, eq=False)
class HeightmapGrid:
    """Heights relative to the base (``values``) at base-frame points ``cell_xy``."""

    values: FloatArray
    cell_xy: FloatArray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        cell_xy = np.array(self.cell_xy, dtype=np.float64)
        if values.shape != GRID_SHAPE:
            raise ShapeError(f"heightmap must be {GRID_SHAPE}, got {values.shape}")
        if cell_xy.shape != (*GRID_SHAPE, 2):
            raise ShapeError(f"cell_xy must be {(*GRID_SHAPE, 2)}, got {cell_xy.shape}")
        values.flags.writeable = False
        cell_xy.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cell_xy", cell_xy)


@dataclass(frozen=True)
class HeightmapDrift:
    """Per-episode sensing offset: xy shifts sample points (base frame), z adds to values."""

    dx: float = 0.0
    dy: float = 0.0
    dz: float = 0.0


NO_DRIFT = HeightmapDrift()


def draw_drift(rng: np.random.Generator, magnitude: float) -> HeightmapDrift:
    """One uniform draw from [-magnitude, magnitude]^3."""
    if not magnitude >= 0:
        raise InvalidArgumentError(f"drift magnitude must be >= 0, got {magnitude}")
    dx, dy, dz = rng.uniform(-magnitude, magnitude, size=3)
    return HeightmapDrift(float(dx), float(dy), float(dz))


def sample_heightmap(
    hf: Heightfield,
    state: RobotState,
    drift: HeightmapDrift = NO_DRIFT,
    config: ObservationConfig = DEFAULT_CONFIG.observation,
) -> HeightmapGrid:
    """Sample terrain around the base with yaw-aligned axes.

    Values are terrain height minus base height; void cells read
    ``config.deep_void``. Raises OutOfBoundsError if any sample point
    leaves the heightfield.
    """
    cell_xy = grid_offsets(config)
    shifted = cell_xy + np.array([drift.dx, drift.dy])
    world = base_to_world_xy(shifted, state.base_xy, state.base_yaw)
    heights, void = hf.sample(world[..., 0], world[..., 1])
    values = np.where(void, config.deep_void, heights - state.base_position[2] + drift.dz)
    return HeightmapGrid(values=values, cell_xy=cell_xy)


def heightmap_drift(
    grid: HeightmapGrid,
    rng: np.random.Generator,
    magnitude: float,
    hf: Optional[Heightfield] = None,
    state: Optional[RobotState] = None,
    config: ObservationConfig = DEFAULT_CONFIG.observation,
) -> HeightmapGrid:
    """Apply one drift draw to ``grid``.

    With the heightfield and state the xy shift re-samples the terrain;
    without them only the z offset can be applied.
    """
    drift = draw_drift(rng, magnitude)
    if hf is not None and state is not None:
        return sample_heightmap(hf, state, drift, config)
    return HeightmapGrid(values=grid.values + drift.dz, cell_xy=grid.cell_xy)


def cell_coords_3d(grid: HeightmapGrid) -> FloatArray:
    """Per-cell (x, y, relative height) in the base frame, shape (17, 11, 3)."""
    return np.concatenate([grid.cell_xy, grid.values[..., None]], axis=-1)
