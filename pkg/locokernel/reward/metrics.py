"""Trajectory-level metrics: velocity tracking error and mechanical power."""

from typing import Sequence

import numpy as np
import numpy.typing as npt

from locokernel.errors import InvalidArgumentError
from locokernel.reward.terms import StepContext


def mean_tracking_error(commands: npt.ArrayLike, velocities: npt.ArrayLike) -> float:
    """Mean planar distance between commanded and actual local velocities."""
    c = np.asarray(commands, dtype=float)
    v = np.asarray(velocities, dtype=float)
    if c.size == 0:
        raise InvalidArgumentError("tracking error needs at least one step")
    c, v = np.atleast_2d(c), np.atleast_2d(v)
    return float(np.mean(np.linalg.norm(c[:, :2] - v[:, :2], axis=1)))


def mean_power(torques: npt.ArrayLike, joint_vel: npt.ArrayLike) -> float:
    """Mean over steps of sum_j |tau_j * qd_j|, watts."""
    tau = np.atleast_2d(np.asarray(torques, dtype=float))
    qd = np.atleast_2d(np.asarray(joint_vel, dtype=float))
    if tau.size == 0:
        raise InvalidArgumentError("power needs at least one step")
    return float(np.mean(np.sum(np.abs(tau * qd), axis=1)))


def tracking_error(contexts: Sequence[StepContext]) -> float:
    if not contexts:
        raise InvalidArgumentError("tracking error needs a non-empty trajectory")
    return mean_tracking_error(
        [c.command for c in contexts], [c.state.base_lin_vel for c in contexts]
    )


def power(contexts: Sequence[StepContext]) -> float:
    if not contexts:
        raise InvalidArgumentError("power needs a non-empty trajectory")
    return mean_power([c.torques for c in contexts], [c.state.joint_vel for c in contexts])
