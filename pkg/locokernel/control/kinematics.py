"""Leg forward kinematics for an A1-class quadruped.

Each leg is an abduction (x axis), hip pitch (y axis) and knee pitch (y axis)
chain. Legs are ordered FR, FL, RR, RL; right legs mirror left legs in y.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, LegConfig
from locokernel.errors import InvalidArgumentError, ShapeError

FloatArray = npt.NDArray[np.float64]

LEG_NAMES = ("FR", "FL", "RR", "RL")
NUM_LEGS = 4
JOINTS_PER_LEG = 3

# (front/rear, left/right) sign of each hip offset
_HIP_SIGNS = ((1.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (-1.0, 1.0))
_SIDES = np.array([sy for _, sy in _HIP_SIGNS])


@dataclass(frozen=True)
class LegGeometry:
    """Hip offsets and link lengths; meters."""

    hip_offsets: Tuple[Tuple[float, float, float], ...]
    l1: float
    l2: float
    l3: float

    def __post_init__(self) -> None:
        if len(self.hip_offsets) != NUM_LEGS:
            raise InvalidArgumentError("need one hip offset per leg")
        if self.l2 <= 0 or self.l3 <= 0 or self.l1 < 0:
            raise InvalidArgumentError("link lengths must be positive")

    @classmethod
    def from_config(cls, leg: LegConfig = DEFAULT_CONFIG.control.leg) -> "LegGeometry":
        return cls(
            hip_offsets=tuple((sx * leg.hip_x, sy * leg.hip_y, 0.0) for sx, sy in _HIP_SIGNS),
            l1=leg.l1,
            l2=leg.l2,
            l3=leg.l3,
        )

    def side(self, leg_index: int) -> float:
        """-1 for right legs, +1 for left legs."""
        return _HIP_SIGNS[leg_index][1]

    @property
    def reach(self) -> float:
        return self.l1 + self.l2 + self.l3


DEFAULT_GEOMETRY = LegGeometry.from_config()


def forward_kinematics(
    q_leg: npt.ArrayLike, leg_index: int, geometry: LegGeometry = DEFAULT_GEOMETRY
) -> FloatArray:
    """Foot position in the base frame for one leg's (abduction, hip, knee) angles."""
    q = np.asarray(q_leg, dtype=float)
    if q.shape != (JOINTS_PER_LEG,):
        raise ShapeError(f"expected 3 joint angles, got shape {q.shape}")
    if not 0 <= leg_index < NUM_LEGS:
        raise InvalidArgumentError(f"leg_index must be 0..3, got {leg_index}")
    q1, q2, q3 = q
    # foot in the abduction frame: links swing in the x-z plane
    px = -geometry.l2 * np.sin(q2) - geometry.l3 * np.sin(q2 + q3)
    py = geometry.side(leg_index) * geometry.l1
    pz = -geometry.l2 * np.cos(q2) - geometry.l3 * np.cos(q2 + q3)
    c, s = np.cos(q1), np.sin(q1)
    hip = geometry.hip_offsets[leg_index]
    return np.array([hip[0] + px, hip[1] + c * py - s * pz, hip[2] + s * py + c * pz])


def forward_kinematics_all(q: npt.ArrayLike, geometry: LegGeometry = DEFAULT_GEOMETRY) -> FloatArray:
    """Base-frame positions of all four feet, shape (4, 3)."""
    qa = np.asarray(q, dtype=float)
    if qa.shape != (NUM_LEGS * JOINTS_PER_LEG,):
        raise ShapeError(f"expected 12 joint angles, got shape {qa.shape}")
    q1, q2, q3 = qa.reshape(NUM_LEGS, JOINTS_PER_LEG).T
    px = -geometry.l2 * np.sin(q2) - geometry.l3 * np.sin(q2 + q3)
    py = _SIDES * geometry.l1
    pz = -geometry.l2 * np.cos(q2) - geometry.l3 * np.cos(q2 + q3)
    c, s = np.cos(q1), np.sin(q1)
    hips = np.asarray(geometry.hip_offsets, dtype=float)
    return hips + np.column_stack([px, c * py - s * pz, s * py + c * pz])
