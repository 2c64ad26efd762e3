"""Single rollouts: observation -> policy -> kinematic step -> reward, logged per step."""

import logging
import time
from typing import Any, Dict, Optional, Tuple

import numpy as np

from locokernel import __version__
from locokernel.config import DEFAULT_CONFIG, KernelConfig
from locokernel.control.commands import CommandSample
from locokernel.errors import InvalidArgumentError, OutOfBoundsError, PolicyError
from locokernel.harness.env import KinematicEnv
from locokernel.harness.log import (
    STATUS_COMPLETED,
    STATUS_FALL,
    STATUS_OUT_OF_BOUNDS,
    STATUS_POLICY_ERROR,
    StepRecord,
    TrajectoryLog,
)
from locokernel.harness.policies import Policy
from locokernel.harness.randomization import NOMINAL_PARAMS, domain_randomize
from locokernel.observation.frame import ObservationFrame, build_frame
from locokernel.observation.heightmap import HeightmapDrift
from locokernel.reward.terms import RewardComputer, StepContext
from locokernel.terrain.generator import generate_terrain
from locokernel.terrain.heightfield import Heightfield
from locokernel.terrain.spec import TerrainKind, TerrainSpec
from locokernel.util.metrics import Metrics

logger = logging.getLogger(__name__)


def spec_to_meta(spec: TerrainSpec) -> Dict[str, Any]:
    return {
        "name": spec.name,
        "kind": spec.kind.value,
        "level": spec.level,
        "extent": list(spec.extent),
        "seed": spec.seed,
        "platform_margin": spec.platform_margin,
        "components": [c.value for c in spec.components] if spec.components else None,
    }


def spec_from_meta(data: Dict[str, Any]) -> TerrainSpec:
    components = data.get("components")
    return TerrainSpec(
        kind=TerrainKind(data["kind"]),
        level=int(data["level"]),
        extent=tuple(data["extent"]),  # type: ignore[arg-type]
        seed=int(data["seed"]),
        platform_margin=float(data["platform_margin"]),
        components=tuple(TerrainKind(c) for c in components) if components else None,  # type: ignore[arg-type]
    )


def _timed(metrics: Optional[Metrics], stage: str, start: float) -> None:
    if metrics is not None:
        metrics.timer_end(stage, start)


def run_rollout(
    terrain: TerrainSpec,
    policy: Policy,
    command: CommandSample,
    duration: float,
    seed: int = 0,
    config: KernelConfig = DEFAULT_CONFIG,
    hf: Optional[Heightfield] = None,
    randomize: bool = False,
    policy_name: str = "custom",
    metrics: Optional[Metrics] = None,
    spawn_xy: Tuple[float, float] = (0.0, 0.0),
    spawn_yaw: float = 0.0,
) -> TrajectoryLog:
    """Run one episode and return its log.

    ``hf`` may carry a pre-generated heightfield for ``terrain`` so callers
    can share one tile across many episodes. The log meta records how the
    episode ended: completed, fall, out_of_bounds or policy_error.

    Policies whose ``needs_frame`` attribute is False are called with
    ``None`` instead of an observation frame.
    """
    if not duration > 0:
        raise InvalidArgumentError(f"duration must be > 0, got {duration}")
    dt = config.harness.dt
    n_steps = int(round(duration / dt))

    if hf is None:
        start = time.perf_counter()
        hf = generate_terrain(terrain, config.terrain)
        _timed(metrics, "terrain", start)

    rng = np.random.default_rng(seed)
    params = domain_randomize(rng, config.randomization) if randomize else NOMINAL_PARAMS
    drift = HeightmapDrift(*params.heightmap_drift)
    env = KinematicEnv(hf, config, params)
    state = env.reset(command, spawn_xy=spawn_xy, yaw=spawn_yaw)
    needs_frame = bool(getattr(policy, "needs_frame", True))
    if hasattr(policy, "reset"):
        policy.reset()
    computer = RewardComputer.from_config(config)

    log = TrajectoryLog(
        meta={
            "version": __version__,
            "terrain": spec_to_meta(terrain),
            "command": {"v_global": list(command.v_global), "yaw_rate": command.yaw_rate},
            "dt": dt,
            "duration": duration,
            "seed": seed,
            "policy": policy_name,
            "spawn_xy": [float(state.base_position[0]), float(state.base_position[1])],
            "spawn_yaw": float(spawn_yaw),
            "randomization": params.to_dict(),
            "status": STATUS_COMPLETED,
        }
    )

    prev_action = np.zeros(12)
    status = STATUS_COMPLETED
    for k in range(n_steps):
        c_local = command.c_local(state.base_yaw)
        try:
            frame: Optional[ObservationFrame] = None
            if needs_frame:
                start = time.perf_counter()
                frame = build_frame(hf, state, c_local, prev_action, drift, config=config.observation)
                _timed(metrics, "frame", start)

            start = time.perf_counter()
            try:
                action = np.asarray(policy(frame), dtype=float)
            except Exception as e:
                raise PolicyError(f"policy raised {type(e).__name__}: {e}") from e
            _timed(metrics, "policy", start)

            start = time.perf_counter()
            result = env.step(action)
            _timed(metrics, "step", start)
        except OutOfBoundsError as e:
            logger.debug(f"Rollout left the terrain at step {k}: {e}")
            status = STATUS_OUT_OF_BOUNDS
            break
        except PolicyError as e:
            logger.warning(f"Policy error at step {k}: {e}")
            status = STATUS_POLICY_ERROR
            break

        start = time.perf_counter()
        breakdown = computer.compute(
            StepContext(
                state=result.state,
                prev_state=state,
                action=action,
                prev_action=prev_action,
                command=c_local,
                torques=result.torques,
                dt=dt,
                collision_count=int(result.base_contact),
                ground_height=result.ground_height,
            )
        )
        _timed(metrics, "reward", start)

        s = result.state
        log.steps.append(
            StepRecord(
                t=(k + 1) * dt,
                base_position=s.base_position.tolist(),
                base_yaw=s.base_yaw,
                v_local=s.base_lin_vel.tolist(),
                ang_vel=s.base_ang_vel.tolist(),
                command=c_local.tolist(),
                joint_pos=s.joint_pos.tolist(),
                joint_vel=s.joint_vel.tolist(),
                action=action.tolist(),
                torques=result.torques.tolist(),
                foot_positions=s.foot_positions.tolist(),
                foot_forces=s.foot_forces.tolist(),
                foot_contact=[bool(c) for c in s.foot_contact],
                foot_over_void=[bool(v) for v in result.foot_over_void],
                base_contact=result.base_contact,
                reward=breakdown.to_dict(),
            )
        )
        state = s
        prev_action = action
        if result.fall:
            status = STATUS_FALL
            break

    log.meta["status"] = status
    if metrics is not None:
        metrics.increment("rollouts")
        if status == STATUS_FALL:
            metrics.increment("falls")
        elif status == STATUS_OUT_OF_BOUNDS:
            metrics.increment("out_of_bounds")
    logger.debug(f"Rollout {terrain.name} L{terrain.level} seed {seed}: {status} after {len(log.steps)} steps")
    return log
