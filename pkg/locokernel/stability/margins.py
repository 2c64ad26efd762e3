"""Center of pressure, capture point and the stability margin rewards."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG
from locokernel.errors import DomainError, InvalidArgumentError, ShapeError
from locokernel.observation.state import RobotState
from locokernel.stability.polygon import SupportPolygon, point_polygon_margin, support_polygon
from locokernel.util.geom import yaw_matrix

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

OUTSIDE_PENALTY = DEFAULT_CONFIG.reward.stability_penalty
GRAVITY = DEFAULT_CONFIG.reward.gravity


class StabilityKind(str, Enum):
    COP = "cop"
    COM = "com"
    CAPTURE_POINT = "capture_point"

    @classmethod
    def parse(cls, value: str) -> "StabilityKind":
        aliases = {"cp": cls.CAPTURE_POINT}
        try:
            return aliases.get(value, None) or cls(value)
        except ValueError as e:
            raise InvalidArgumentError(f"unknown stability kind {value!r}") from e


@dataclass(frozen=True)
class StabilityResult:
    margin: float
    point: tuple[float, float]
    kind: StabilityKind


def center_of_pressure(positions: npt.ArrayLike, forces: npt.ArrayLike) -> Optional[FloatArray]:
    """Vertical-force-weighted mean of contact positions; None without positive load."""
    p = np.asarray(positions, dtype=float).reshape(-1, 3)
    f = np.asarray(forces, dtype=float).reshape(-1, 3)
    if len(p) != len(f):
        raise ShapeError("positions and forces must pair up")
    loaded = f[:, 2] > 0
    total = float(f[loaded, 2].sum())
    if total <= 0:
        return None
    return (p[loaded, :2] * f[loaded, 2:3]).sum(axis=0) / total


def state_support_polygon(state: RobotState) -> SupportPolygon:
    return support_polygon(state.foot_positions[state.foot_contact, :2])


def state_center_of_pressure(state: RobotState) -> Optional[FloatArray]:
    """CoP over every loaded foot; the polygon only uses feet flagged in contact."""
    return center_of_pressure(state.foot_positions, state.foot_forces)


def pendulum_height(state: RobotState, ground_height: Optional[float] = None) -> float:
    """Base height above ``ground_height``, by default the mean contact-foot height (0 in flight)."""
    if ground_height is None:
        contacts = state.foot_positions[state.foot_contact]
        ground_height = float(contacts[:, 2].mean()) if len(contacts) else 0.0
    return float(state.base_position[2]) - ground_height


def capture_point(
    state: RobotState,
    gravity: float = GRAVITY,
    ground_height: Optional[float] = None,
) -> FloatArray:
    """Linear-inverted-pendulum capture point CoM_xy + v_xy * sqrt(z / g).

    ``z`` is :func:`pendulum_height`. The base velocity is rotated from the
    base frame to the world.
    """
    if not gravity > 0:
        raise DomainError(f"gravity must be > 0, got {gravity}")
    z_rel = pendulum_height(state, ground_height)
    if not z_rel > 0:
        raise DomainError(f"pendulum height must be > 0, got {z_rel:.4f} m")
    v_world = yaw_matrix(state.base_yaw) @ state.base_lin_vel[:2]
    return state.base_xy + v_world * math.sqrt(z_rel / gravity)


def _reference_point(state: RobotState, kind: StabilityKind, gravity: float) -> Optional[FloatArray]:
    if kind is StabilityKind.COP:
        return state_center_of_pressure(state)
    if kind is StabilityKind.COM:
        return np.array(state.base_xy)
    # base at or below the contact plane: no pendulum, margin undefined
    if not pendulum_height(state) > 0:
        return None
    return capture_point(state, gravity)


def stability_margin(
    state: RobotState,
    kind: StabilityKind = StabilityKind.COP,
    gravity: float = GRAVITY,
) -> Optional[StabilityResult]:
    """Signed margin of the chosen reference point; None when undefined."""
    kind = StabilityKind(kind)
    polygon = state_support_polygon(state)
    if polygon.is_degenerate:
        return None
    point = _reference_point(state, kind, gravity)
    if point is None:
        return None
    return StabilityResult(
        margin=point_polygon_margin(point, polygon),
        point=(float(point[0]), float(point[1])),
        kind=kind,
    )


def stability_reward(
    state: RobotState,
    kind: StabilityKind = StabilityKind.COP,
    penalty: float = OUTSIDE_PENALTY,
    gravity: float = GRAVITY,
) -> float:
    """Margin inside the polygon, ``penalty`` outside, 0 when undefined."""
    result = stability_margin(state, kind, gravity)
    if result is None:
        return 0.0
    return result.margin if result.margin >= 0 else float(penalty)


def stability_reward_cop(state: RobotState, penalty: float = OUTSIDE_PENALTY) -> float:
    return stability_reward(state, StabilityKind.COP, penalty)


def static_margin_com(state: RobotState, penalty: float = OUTSIDE_PENALTY) -> float:
    return stability_reward(state, StabilityKind.COM, penalty)


def capture_point_margin(
    state: RobotState, penalty: float = OUTSIDE_PENALTY, gravity: float = GRAVITY
) -> float:
    return stability_reward(state, StabilityKind.CAPTURE_POINT, penalty, gravity)
