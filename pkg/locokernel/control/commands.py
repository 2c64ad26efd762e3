"""Global-frame velocity commands and their per-step local transform."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG
from locokernel.errors import InvalidArgumentError, NumericError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Range = Tuple[float, float]


def _check_range(name: str, r: Range) -> None:
    if not (np.isfinite(r[0]) and np.isfinite(r[1])) or r[0] > r[1]:
        raise InvalidArgumentError(f"{name} must be a finite (low, high) pair, got {r}")


def to_local(v_global: npt.ArrayLike, base_yaw: float, yaw_rate: float) -> FloatArray:
    """Rotate a world-frame planar velocity into the base frame: [vx, vy, yaw_rate]."""
    v = np.asarray(v_global, dtype=float)[:2]
    if not (np.all(np.isfinite(v)) and np.isfinite(base_yaw) and np.isfinite(yaw_rate)):
        raise NumericError("command transform needs finite inputs")
    c, s = np.cos(base_yaw), np.sin(base_yaw)
    return np.array([c * v[0] + s * v[1], -s * v[0] + c * v[1], float(yaw_rate)])


def to_global(c_local: npt.ArrayLike, base_yaw: float) -> Tuple[FloatArray, float]:
    """Inverse of :func:`to_local`: (world planar velocity, yaw rate)."""
    c_arr = np.asarray(c_local, dtype=float)
    c, s = np.cos(base_yaw), np.sin(base_yaw)
    v = np.array([c * c_arr[0] - s * c_arr[1], s * c_arr[0] + c * c_arr[1]])
    return v, float(c_arr[2])


@dataclass(frozen=True)
class CommandSample:
    """Episode command fixed in the world frame."""

    v_global: Tuple[float, float]
    yaw_rate: float

    @property
    def speed(self) -> float:
        return float(np.hypot(*self.v_global))

    def c_local(self, base_yaw: float) -> FloatArray:
        return to_local(self.v_global, base_yaw, self.yaw_rate)

    @classmethod
    def forward(cls, speed: float, yaw_rate: float = 0.0) -> "CommandSample":
        """Straight-ahead command along world +x, as used by the evaluation protocol."""
        return cls(v_global=(float(speed), 0.0), yaw_rate=float(yaw_rate))


def sample_global_command(
    rng: np.random.Generator,
    v_range: Optional[Range] = None,
    yaw_rate_range: Optional[Range] = None,
    heading_range: Optional[Range] = None,
) -> CommandSample:
    """Draw a world-frame command: speed and heading uniform, yaw rate uniform."""
    cfg = DEFAULT_CONFIG.control
    v_range = v_range or cfg.speed_range
    yaw_rate_range = yaw_rate_range or cfg.yaw_rate_range
    heading_range = heading_range or cfg.heading_range
    _check_range("v_range", v_range)
    _check_range("yaw_rate_range", yaw_rate_range)
    _check_range("heading_range", heading_range)
    if v_range[0] < 0:
        raise InvalidArgumentError("speeds must be non-negative")

    speed = rng.uniform(*v_range)
    heading = rng.uniform(*heading_range)
    yaw_rate = rng.uniform(*yaw_rate_range)
    return CommandSample(
        v_global=(float(speed * np.cos(heading)), float(speed * np.sin(heading))),
        yaw_rate=float(yaw_rate),
    )
