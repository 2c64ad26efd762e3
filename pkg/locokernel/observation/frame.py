"""One timestep's observation: heightmap, footmap, 3D cell coordinates, proprioception."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, ObservationConfig
from locokernel.errors import ParseError, ShapeError
from locokernel.observation.footmap import Footmap, build_footmap
from locokernel.observation.heightmap import (
    GRID_SHAPE,
    NO_DRIFT,
    HeightmapDrift,
    HeightmapGrid,
    cell_coords_3d,
    sample_heightmap,
)
from locokernel.observation.proprio import PROPRIO_DIM, assemble_proprio
from locokernel.observation.state import RobotState, feet_in_base_frame
from locokernel.terrain.heightfield import Heightfield
from locokernel.util.fs import atomic_write_lines

FloatArray = npt.NDArray[np.float64]

FRAME_SCHEMA = "locokernel.frame"
FRAME_VERSION = 1


@dataclass(frozen=True, eq=False)
class ObservationFrame:
    heightmap: HeightmapGrid
    footmap: Footmap
    proprio: FloatArray

    def __post_init__(self) -> None:
        proprio = np.array(self.proprio, dtype=np.float64)
        if proprio.shape != (PROPRIO_DIM,):
            raise ShapeError(f"proprio must have {PROPRIO_DIM} entries, got {proprio.shape}")
        if self.footmap.values.shape != (*GRID_SHAPE, 4):
            raise ShapeError(f"footmap must be {(*GRID_SHAPE, 4)}, got {self.footmap.values.shape}")
        object.__setattr__(self, "proprio", proprio)

    @property
    def coords_3d(self) -> FloatArray:
        return cell_coords_3d(self.heightmap)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": FRAME_SCHEMA,
            "version": FRAME_VERSION,
            "heightmap": self.heightmap.values.tolist(),
            "cell_xy": self.heightmap.cell_xy.tolist(),
            "coords_3d": self.coords_3d.tolist(),
            "footmap": self.footmap.values.tolist(),
            "proprio": self.proprio.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ObservationFrame":
        if data.get("schema") != FRAME_SCHEMA:
            raise ParseError(f"not an observation frame (schema {data.get('schema')!r})", 1)
        return cls(
            heightmap=HeightmapGrid(values=data["heightmap"], cell_xy=data["cell_xy"]),
            footmap=Footmap(values=np.asarray(data["footmap"], dtype=float)),
            proprio=np.asarray(data["proprio"], dtype=float),
        )


def build_frame(
    hf: Heightfield,
    state: RobotState,
    command: npt.ArrayLike,
    prev_action: npt.ArrayLike,
    drift: HeightmapDrift = NO_DRIFT,
    foot_xy: Optional[npt.ArrayLike] = None,
    config: ObservationConfig = DEFAULT_CONFIG.observation,
) -> ObservationFrame:
    """Assemble the full observation for one step.

    ``foot_xy`` overrides the base-frame foot positions (e.g. from forward
    kinematics on hardware); by default they come from the state.
    """
    grid = sample_heightmap(hf, state, drift, config)
    feet = feet_in_base_frame(state) if foot_xy is None else np.asarray(foot_xy, dtype=float)
    return ObservationFrame(
        heightmap=grid,
        footmap=build_footmap(feet, grid.cell_xy, config),
        proprio=assemble_proprio(state, command, prev_action),
    )


def write_frame(frame: ObservationFrame, path: Union[str, Path]) -> Path:
    return atomic_write_lines(path, [json.dumps(frame.to_dict(), indent=2)])


def read_frame(path: Union[str, Path]) -> ObservationFrame:
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno) from e
    return ObservationFrame.from_dict(data)
