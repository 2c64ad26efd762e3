"""Kinematic stepper standing in for a physics simulator.

Joints track delayed PD targets with first-order dynamics, the base follows
the episode command while at least one stance foot is supported, and the
base height comes from the highest supporting foot. Void cells never
support a foot.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Optional

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, KernelConfig
from locokernel.control.commands import CommandSample, to_local
from locokernel.control.kinematics import DEFAULT_GEOMETRY, LegGeometry, forward_kinematics_all
from locokernel.control.pd import joint_limits, joint_targets, pd_torque
from locokernel.errors import PolicyError
from locokernel.harness.randomization import NOMINAL_PARAMS, RandomizedParams
from locokernel.observation.state import RobotState
from locokernel.terrain.heightfield import Heightfield
from locokernel.util.geom import base_to_world_xy

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]


@dataclass(frozen=True)
class StepResult:
    state: RobotState
    torques: FloatArray
    base_contact: bool
    fall: bool
    foot_over_void: BoolArray
    ground_height: float


@dataclass(frozen=True)
class _Support:
    feet_world: FloatArray
    contact: BoolArray
    over_void: BoolArray
    base_z: float
    ground_height: float
    fall: bool


class KinematicEnv:
    """One environment instance on a fixed heightfield."""

    def __init__(
        self,
        hf: Heightfield,
        config: KernelConfig = DEFAULT_CONFIG,
        params: RandomizedParams = NOMINAL_PARAMS,
        geometry: LegGeometry = DEFAULT_GEOMETRY,
    ):
        self.hf = hf
        self.config = config
        self.params = params
        self.geometry = geometry
        self.dt = config.harness.dt
        self.mass = config.harness.total_mass + params.payload_mass
        self.command = CommandSample.forward(0.0)
        self.state = RobotState()
        self._targets: Deque[FloatArray] = deque(maxlen=params.delay_steps(self.dt) + 1)
        self._limits = joint_limits(config.control)
        self._q_default = np.asarray(config.control.q_default, dtype=float)

    def reset(
        self,
        command: CommandSample,
        spawn_xy: tuple[float, float] = (0.0, 0.0),
        yaw: float = 0.0,
    ) -> RobotState:
        q_default = self._q_default
        q = self._clamp(q_default * self.params.init_joint_scale)
        self.command = command
        self._targets.clear()
        for _ in range(self._targets.maxlen or 1):
            self._targets.append(q_default.copy())
        support = self._support(q, np.asarray(spawn_xy, dtype=float), yaw, prev_z=None)
        self.state = self._make_state(
            q=q,
            qd=np.zeros(12),
            base_xy=np.asarray(spawn_xy, dtype=float),
            yaw=yaw,
            support=support,
            v_world=np.zeros(2),
            vz=0.0,
            yaw_rate=0.0,
        )
        return self.state

    # ---------------------------------------------------------------- stepping

    def step(self, action: npt.ArrayLike) -> StepResult:
        a = np.asarray(action, dtype=float)
        if a.shape != (12,) or not np.all(np.isfinite(a)):
            raise PolicyError(f"policy returned an invalid action (shape {a.shape})")
        cfg = self.config
        prev = self.state

        self._targets.append(joint_targets(a, cfg.control))
        applied = self._targets[0]
        torques = self.params.motor_strength * pd_torque(
            applied,
            prev.joint_pos,
            prev.joint_vel,
            cfg.control,
            kp=cfg.control.kp * self.params.kp_scale,
            kd=cfg.control.kd * self.params.kd_scale,
        )
        torques = np.clip(torques, -cfg.control.torque_limit, cfg.control.torque_limit)

        alpha = min(1.0, self.dt / cfg.harness.joint_time_constant)
        q = self._clamp(prev.joint_pos + alpha * (applied - prev.joint_pos))
        qd = (q - prev.joint_pos) / self.dt

        supported_before = bool(prev.foot_contact.any())
        v_world = np.asarray(self.command.v_global) * (1.0 - cfg.harness.gait_slip)
        if not supported_before:
            v_world = np.zeros(2)
        yaw = prev.base_yaw + self.command.yaw_rate * self.dt
        base_xy = prev.base_xy + v_world * self.dt

        support = self._support(q, base_xy, yaw, prev_z=float(prev.base_position[2]))
        vz = (support.base_z - float(prev.base_position[2])) / self.dt
        self.state = self._make_state(q, qd, base_xy, yaw, support, v_world, vz, self.command.yaw_rate)
        return StepResult(
            state=self.state,
            torques=torques,
            base_contact=self._base_contact(base_xy, support.base_z),
            fall=support.fall,
            foot_over_void=support.over_void,
            ground_height=support.ground_height,
        )

    # ---------------------------------------------------------------- helpers

    def _clamp(self, q: FloatArray) -> FloatArray:
        return np.clip(q, self._limits[:, 0], self._limits[:, 1])

    def _support(self, q: FloatArray, base_xy: FloatArray, yaw: float, prev_z: Optional[float]) -> _Support:
        h = self.config.harness
        fk = forward_kinematics_all(q, self.geometry)
        feet_xy = base_to_world_xy(fk[:, :2], base_xy, yaw)
        terrain, void = self.hf.sample(feet_xy[:, 0], feet_xy[:, 1])

        stance = fk[:, 2] <= fk[:, 2].min() + h.contact_tolerance
        supported = stance & ~void
        fall = not supported.any()
        if fall:
            base_z = prev_z if prev_z is not None else float(-fk[:, 2].min())
            ground = base_z + float(fk[:, 2].min())
        else:
            base_z = float(np.max(terrain[supported] - fk[supported, 2]))
            ground = float(np.mean(terrain[supported]))

        feet_world = np.column_stack([feet_xy, base_z + fk[:, 2]])
        contact = ~void & (feet_world[:, 2] - terrain <= h.contact_tolerance)
        return _Support(
            feet_world=feet_world,
            contact=contact,
            over_void=void.copy(),
            base_z=base_z,
            ground_height=ground,
            fall=fall,
        )

    def _base_contact(self, base_xy: FloatArray, base_z: float) -> bool:
        heights, void = self.hf.sample(base_xy[0], base_xy[1])
        if bool(void):
            return False
        return base_z - float(heights) < self.config.harness.base_clearance

    def _make_state(
        self,
        q: FloatArray,
        qd: FloatArray,
        base_xy: FloatArray,
        yaw: float,
        support: _Support,
        v_world: FloatArray,
        vz: float,
        yaw_rate: float,
    ) -> RobotState:
        h = self.config.harness
        forces = np.zeros((4, 3))
        n_contact = int(support.contact.sum())
        if n_contact:
            forces[support.contact, 2] = self.mass * h.gravity / n_contact
        v_local = to_local(v_world, yaw, 0.0)
        return RobotState(
            base_position=np.array([base_xy[0], base_xy[1], support.base_z]),
            base_yaw=yaw,
            base_lin_vel=np.array([v_local[0], v_local[1], vz]),
            base_ang_vel=np.array([0.0, 0.0, yaw_rate]),
            joint_pos=q,
            joint_vel=qd,
            foot_positions=support.feet_world,
            foot_forces=forces,
            foot_contact=support.contact,
        )
