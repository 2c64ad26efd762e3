"""48-dim proprioception vector."""

from typing import Dict

import numpy as np
import numpy.typing as npt

from locokernel.errors import ShapeError
from locokernel.observation.state import RobotState

FloatArray = npt.NDArray[np.float64]

PROPRIO_DIM = 48

# v, omega, gravity, command, q, qd, previous action
PROPRIO_SLICES: Dict[str, slice] = {
    "lin_vel": slice(0, 3),
    "ang_vel": slice(3, 6),
    "gravity": slice(6, 9),
    "command": slice(9, 12),
    "joint_pos": slice(12, 24),
    "joint_vel": slice(24, 36),
    "prev_action": slice(36, 48),
}


def assemble_proprio(state: RobotState, command: npt.ArrayLike, prev_action: npt.ArrayLike) -> FloatArray:
    c = np.asarray(command, dtype=float)
    a = np.asarray(prev_action, dtype=float)
    if c.shape != (3,):
        raise ShapeError(f"command must have 3 entries, got shape {c.shape}")
    if a.shape != (12,):
        raise ShapeError(f"prev_action must have 12 entries, got shape {a.shape}")
    return np.concatenate(
        [
            state.base_lin_vel,
            state.base_ang_vel,
            state.gravity_vec,
            c,
            state.joint_pos,
            state.joint_vel,
            a,
        ]
    )


def proprio_part(o_prop: npt.ArrayLike, name: str) -> FloatArray:
    """Named slice of a proprioception vector."""
    return np.asarray(o_prop, dtype=float)[PROPRIO_SLICES[name]]
