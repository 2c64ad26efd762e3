"""Gaussian foot-position map rasterised onto the heightmap grid."""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, ObservationConfig
from locokernel.errors import ShapeError

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class Footmap:
    """(17, 11, 4) weights, one channel per foot in FR, FL, RR, RL order."""

    values: FloatArray

    def channel(self, k: int) -> FloatArray:
        return self.values[..., k]


def build_footmap(
    foot_xy: npt.ArrayLike,
    cell_xy: npt.ArrayLike,
    config: ObservationConfig = DEFAULT_CONFIG.observation,
) -> Footmap:
    """w * exp(-d^2 / (2 sigma^2)) per foot, d the planar distance to each cell.

    ``foot_xy`` (4, 2) must be in the same base frame as ``cell_xy`` (H, W, 2).
    """
    feet = np.asarray(foot_xy, dtype=float)
    cells = np.asarray(cell_xy, dtype=float)
    if feet.ndim != 2 or feet.shape[1] < 2:
        raise ShapeError(f"foot_xy must be (4, 2), got {feet.shape}")
    if cells.ndim != 3 or cells.shape[-1] != 2:
        raise ShapeError(f"cell_xy must be (H, W, 2), got {cells.shape}")
    diff = cells[:, :, None, :] - feet[None, None, :, :2]
    d2 = np.einsum("hwkc,hwkc->hwk", diff, diff)
    values = config.footmap_weight * np.exp(-d2 / (2.0 * config.footmap_sigma**2))
    return Footmap(values=values)
