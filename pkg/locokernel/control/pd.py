"""Action scaling, PD torques and joint limits."""

from typing import Optional

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, ControlConfig
from locokernel.errors import NumericError, ShapeError

FloatArray = npt.NDArray[np.float64]


def _joint_vector(name: str, value: npt.ArrayLike) -> FloatArray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (12,):
        raise ShapeError(f"{name} must have 12 entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} contains non-finite values")
    return arr


def joint_targets(action: npt.ArrayLike, config: ControlConfig = DEFAULT_CONFIG.control) -> FloatArray:
    """q_target = q_default + action_scale * action."""
    a = _joint_vector("action", action)
    return np.asarray(config.q_default, dtype=float) + config.action_scale * a


def pd_torque(
    q_target: npt.ArrayLike,
    q: npt.ArrayLike,
    qd: npt.ArrayLike,
    config: ControlConfig = DEFAULT_CONFIG.control,
    kp: Optional[float] = None,
    kd: Optional[float] = None,
) -> FloatArray:
    """kp * (q_target - q) - kd * qd, clamped to the torque limit."""
    kp = config.kp if kp is None else kp
    kd = config.kd if kd is None else kd
    tau = kp * (_joint_vector("q_target", q_target) - _joint_vector("q", q)) - kd * _joint_vector("qd", qd)
    return np.clip(tau, -config.torque_limit, config.torque_limit)


def joint_limits(config: ControlConfig = DEFAULT_CONFIG.control) -> FloatArray:
    """(12, 2) lower/upper bounds in FR, FL, RR, RL x (abduction, hip, knee) order."""
    per_leg = np.array([config.abduction_limits, config.hip_limits, config.knee_limits])
    return np.tile(per_leg, (4, 1))


def clamp_joint_limits(q: npt.ArrayLike, config: ControlConfig = DEFAULT_CONFIG.control) -> FloatArray:
    limits = joint_limits(config)
    return np.clip(np.asarray(q, dtype=float), limits[:, 0], limits[:, 1])
