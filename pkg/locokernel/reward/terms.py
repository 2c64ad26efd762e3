"""Per-step reward terms and their weighted sum.

Each term is a ``_reward_<name>`` method returning the pre-weight value;
:class:`RewardComputer` walks :data:`REWARD_TERMS` in order and sums
``term * weight``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, KernelConfig, RewardConfig
from locokernel.errors import InvalidArgumentError, NumericError, ShapeError
from locokernel.observation.state import RobotState
from locokernel.stability.margins import StabilityKind, stability_reward

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

REWARD_TERMS = (
    "lin_vel_track",
    "ang_vel_track",
    "z_vel_penalty",
    "ang_vel_penalty",
    "torque",
    "joint_accel",
    "base_height",
    "action_rate",
    "collisions",
    "stumble",
    "joint_error",
    "stability",
)


def phi(x: npt.ArrayLike, sigma: float = DEFAULT_CONFIG.reward.tracking_sigma) -> float:
    """exp(-||x||^2 / sigma), the tracking kernel."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericError("phi needs a finite input")
    return math.exp(-float(np.dot(arr.ravel(), arr.ravel())) / sigma)


def _vector(name: str, value: npt.ArrayLike, size: int) -> FloatArray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size,):
        raise ShapeError(f"{name} must have {size} entries, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class StepContext:
    """Everything one reward evaluation reads.

    ``command`` is the local command [vx, vy, yaw_rate]. ``ground_height``
    is the terrain under the base, so the height term is relative.
    ``stumble_count`` overrides the count derived from foot forces.
    """

    state: RobotState
    prev_state: RobotState
    action: FloatArray
    prev_action: FloatArray
    command: FloatArray
    torques: FloatArray
    dt: float
    collision_count: int = 0
    stumble_count: Optional[int] = None
    target_height: float = DEFAULT_CONFIG.reward.z_target
    ground_height: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", _vector("action", self.action, 12))
        object.__setattr__(self, "prev_action", _vector("prev_action", self.prev_action, 12))
        object.__setattr__(self, "command", _vector("command", self.command, 3))
        object.__setattr__(self, "torques", _vector("torques", self.torques, 12))
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be > 0, got {self.dt}")

    def check_finite(self) -> None:
        arrays = [self.action, self.prev_action, self.command, self.torques]
        for s in (self.state, self.prev_state):
            arrays += [
                s.base_position,
                s.base_lin_vel,
                s.base_ang_vel,
                s.joint_pos,
                s.joint_vel,
                s.foot_positions,
                s.foot_forces,
            ]
        scalars = [self.dt, self.target_height, self.ground_height, self.state.base_yaw]
        flat = np.concatenate([a.ravel() for a in arrays])
        if not np.isfinite(flat).all() or not all(math.isfinite(v) for v in scalars):
            raise NumericError("reward context contains non-finite values")


@dataclass(frozen=True)
class RewardBreakdown:
    terms: Dict[str, float]
    weights: Dict[str, float]
    total: float

    def weighted(self, name: str) -> float:
        return self.terms[name] * self.weights[name]

    def to_dict(self) -> Dict[str, float]:
        out = dict(self.terms)
        out["total"] = self.total
        return out


def stumble_count(foot_forces: npt.ArrayLike, ratio: float = DEFAULT_CONFIG.reward.stumble_ratio) -> int:
    """Feet whose horizontal force exceeds ``ratio`` times the vertical force."""
    f = np.asarray(foot_forces, dtype=float).reshape(-1, 3)
    return int(np.sum(np.linalg.norm(f[:, :2], axis=1) > ratio * np.abs(f[:, 2])))


class RewardComputer:
    """Evaluates every reward term for a :class:`StepContext`."""

    def __init__(
        self,
        config: RewardConfig = DEFAULT_CONFIG.reward,
        q_default: Sequence[float] = DEFAULT_CONFIG.control.q_default,
    ):
        self.config = config
        self.weights: Dict[str, float] = config.weights.model_dump()
        self.q_default = np.asarray(q_default, dtype=float)
        self.stability_kind = StabilityKind(config.stability_kind)
        self._terms = [(name, getattr(self, f"_reward_{name}")) for name in REWARD_TERMS]

    @classmethod
    def from_config(cls, config: KernelConfig = DEFAULT_CONFIG) -> "RewardComputer":
        return cls(config.reward, config.control.q_default)

    def compute(self, ctx: StepContext) -> RewardBreakdown:
        ctx.check_finite()
        terms = {name: float(term(ctx)) for name, term in self._terms}
        total = 0.0
        for name in REWARD_TERMS:
            total += terms[name] * self.weights[name]
        return RewardBreakdown(terms=terms, weights=dict(self.weights), total=total)

    # ------------------------------------------------------------------ terms

    def _reward_lin_vel_track(self, ctx: StepContext) -> float:
        return phi(ctx.command[:2] - ctx.state.base_lin_vel[:2], self.config.tracking_sigma)

    def _reward_ang_vel_track(self, ctx: StepContext) -> float:
        return phi(ctx.command[2:3] - ctx.state.base_ang_vel[2:3], self.config.tracking_sigma)

    def _reward_z_vel_penalty(self, ctx: StepContext) -> float:
        return -float(ctx.state.base_lin_vel[2] ** 2)

    def _reward_ang_vel_penalty(self, ctx: StepContext) -> float:
        # all three axes, yaw included
        return -float(np.sum(ctx.state.base_ang_vel**2))

    def _reward_torque(self, ctx: StepContext) -> float:
        return -float(np.sum(ctx.torques**2))

    def _reward_joint_accel(self, ctx: StepContext) -> float:
        qdd = (ctx.state.joint_vel - ctx.prev_state.joint_vel) / ctx.dt
        return -float(np.sum(qdd**2))

    def _reward_base_height(self, ctx: StepContext) -> float:
        z = float(ctx.state.base_position[2]) - ctx.ground_height
        return -((ctx.target_height - z) ** 2)

    def _reward_action_rate(self, ctx: StepContext) -> float:
        a_dot = (ctx.action - ctx.prev_action) / ctx.dt
        return -float(np.sum(a_dot**2))

    def _reward_collisions(self, ctx: StepContext) -> float:
        return -float(ctx.collision_count)

    def _reward_stumble(self, ctx: StepContext) -> float:
        if ctx.stumble_count is not None:
            return -float(ctx.stumble_count)
        return -float(stumble_count(ctx.state.foot_forces, self.config.stumble_ratio))

    def _reward_joint_error(self, ctx: StepContext) -> float:
        return -float(np.sum((self.q_default - ctx.state.joint_pos) ** 2))

    def _reward_stability(self, ctx: StepContext) -> float:
        return stability_reward(
            ctx.state, self.stability_kind, self.config.stability_penalty, self.config.gravity
        )


def compute_rewards(ctx: StepContext, config: KernelConfig = DEFAULT_CONFIG) -> RewardBreakdown:
    """One-off evaluation with the reward settings and default pose of ``config``."""
    return RewardComputer.from_config(config).compute(ctx)


def breakdown_means(breakdowns: Iterable[RewardBreakdown]) -> Dict[str, float]:
    """Mean of every term (pre-weight) and of the total."""
    rows = [b.to_dict() for b in breakdowns]
    if not rows:
        raise InvalidArgumentError("no reward breakdowns to average")
    return {key: float(np.mean([r[key] for r in rows])) for key in rows[0]}
