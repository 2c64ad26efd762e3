"""Robot state snapshot consumed by observation, stability and reward code."""

from dataclasses import dataclass, field, replace as dataclass_replace
from typing import Any, Dict, Optional

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG
from locokernel.control.kinematics import DEFAULT_GEOMETRY, LegGeometry, forward_kinematics_all
from locokernel.errors import InvalidArgumentError, ShapeError
from locokernel.util.geom import base_to_world_xy, world_to_base_xy

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

GRAVITY_TOLERANCE = 1e-9

_SHAPES = {
    "base_position": (3,),
    "base_lin_vel": (3,),
    "base_ang_vel": (3,),
    "gravity_vec": (3,),
    "joint_pos": (12,),
    "joint_vel": (12,),
    "foot_positions": (4, 3),
    "foot_forces": (4, 3),
}


def _zeros(*shape: int) -> FloatArray:
    return np.zeros(shape)


@dataclass(frozen=True, eq=False)
class RobotState:
    """Base pose and velocities, joint state and per-foot contact data.

    Velocities are in the base frame, foot positions in the world frame.
    Feet are ordered FR, FL, RR, RL. Orientation is yaw only; the gravity
    vector is kept separately for proprioception.
    """

    base_position: FloatArray = field(default_factory=lambda: _zeros(3))
    base_yaw: float = 0.0
    base_lin_vel: FloatArray = field(default_factory=lambda: _zeros(3))
    base_ang_vel: FloatArray = field(default_factory=lambda: _zeros(3))
    gravity_vec: FloatArray = field(default_factory=lambda: np.array([0.0, 0.0, -1.0]))
    joint_pos: FloatArray = field(default_factory=lambda: _zeros(12))
    joint_vel: FloatArray = field(default_factory=lambda: _zeros(12))
    foot_positions: FloatArray = field(default_factory=lambda: _zeros(4, 3))
    foot_forces: FloatArray = field(default_factory=lambda: _zeros(4, 3))
    foot_contact: BoolArray = field(default_factory=lambda: np.zeros(4, dtype=bool))

    def __post_init__(self) -> None:
        for name, shape in _SHAPES.items():
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise ShapeError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        contact = np.array(self.foot_contact, dtype=bool)
        if contact.shape != (4,):
            raise ShapeError(f"foot_contact must have shape (4,), got {contact.shape}")
        contact.flags.writeable = False
        object.__setattr__(self, "foot_contact", contact)
        object.__setattr__(self, "base_yaw", float(self.base_yaw))

        norm = float(np.linalg.norm(self.gravity_vec))
        if not abs(norm - 1.0) <= GRAVITY_TOLERANCE:
            raise InvalidArgumentError(f"gravity_vec must be a unit vector, norm is {norm}")

    @property
    def base_xy(self) -> FloatArray:
        return self.base_position[:2]

    def replace(self, **changes: Any) -> "RobotState":
        return dataclass_replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {name: getattr(self, name).tolist() for name in _SHAPES}
        out["base_yaw"] = self.base_yaw
        out["foot_contact"] = [bool(c) for c in self.foot_contact]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RobotState":
        return cls(**{k: data[k] for k in (*_SHAPES, "base_yaw", "foot_contact") if k in data})

    @classmethod
    def standing(
        cls,
        x: float = 0.0,
        y: float = 0.0,
        ground: float = 0.0,
        yaw: float = 0.0,
        q: Optional[npt.ArrayLike] = None,
        geometry: LegGeometry = DEFAULT_GEOMETRY,
        mass: float = DEFAULT_CONFIG.harness.total_mass,
        gravity: float = DEFAULT_CONFIG.harness.gravity,
    ) -> "RobotState":
        """All four feet on flat ground at ``ground`` in the given joint pose."""
        joints = np.asarray(DEFAULT_CONFIG.control.q_default if q is None else q, dtype=float)
        feet_base = forward_kinematics_all(joints, geometry)
        base_z = ground - float(feet_base[:, 2].min())
        feet = np.empty((4, 3))
        feet[:, :2] = base_to_world_xy(feet_base[:, :2], (x, y), yaw)
        feet[:, 2] = base_z + feet_base[:, 2]
        forces = np.zeros((4, 3))
        forces[:, 2] = mass * gravity / 4
        return cls(
            base_position=np.array([x, y, base_z]),
            base_yaw=yaw,
            joint_pos=joints,
            foot_positions=feet,
            foot_forces=forces,
            foot_contact=np.ones(4, dtype=bool),
        )


def feet_in_base_frame(state: RobotState) -> FloatArray:
    """Planar foot positions in the yaw-aligned base frame, shape (4, 2)."""
    return world_to_base_xy(state.foot_positions[:, :2], state.base_xy, state.base_yaw)
