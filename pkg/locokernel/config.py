"""Kernel configuration: pydantic schema, YAML profiles and built-in defaults.

Every tunable constant of the kernel lives here. Profiles are YAML files under
``configs/kernel/<profile>.yaml``; missing files fall back to the defaults
declared on the models, so a bare checkout runs without any config on disk.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from locokernel.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path("configs/kernel")

# (value at level 0, value at level 9); intermediate levels interpolate linearly
Span = Tuple[float, float]

MAX_LEVEL = 9


def lerp_level(span: Span, level: int) -> float:
    """Linear interpolation of a level-0..9 parameter span."""
    if not 0 <= level <= MAX_LEVEL:
        raise InvalidArgumentError(f"level must be in [0, {MAX_LEVEL}], got {level}")
    lo, hi = span
    if level == 0:
        return float(lo)
    if level == MAX_LEVEL:
        return float(hi)
    return float(lo + (hi - lo) * level / MAX_LEVEL)


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class StoneTable(_Frozen):
    """Stepping-stone endpoints; level 0 and level 9 rows, meters."""

    stone_size: Span = (0.92, 0.40)
    stone_gap: Span = (0.025, 0.20)
    max_shift: Span = (0.0, 0.10)
    max_height: Span = (0.01, 0.10)


class TerrainConfig(_Frozen):
    resolution: float = Field(0.05, gt=0)
    extent: Tuple[float, float] = (8.0, 8.0)
    platform_margin: float = Field(1.0, ge=0)
    stones: StoneTable = StoneTable()
    small_stones: StoneTable = StoneTable(
        stone_size=(0.30, 0.18),
        stone_gap=(0.03, 0.12),
        max_shift=(0.0, 0.04),
        max_height=(0.01, 0.06),
    )
    rough_amplitude: Span = (0.01, 0.08)
    rough_scale: float = Field(0.2, gt=0)
    rough_step: float = Field(0.005, gt=0)
    discrete_height: Span = (0.05, 0.20)
    discrete_size: Tuple[float, float] = (0.4, 2.0)
    discrete_density: float = Field(0.5, ge=0)
    stair_width: float = Field(0.31, gt=0)
    stair_rise: Span = (0.05, 0.18)
    beam_width: Span = (0.45, 0.20)
    beam_gap: Span = (0.05, 0.25)
    beam_max_height: float = 0.02
    pallet_slat_width: float = Field(0.15, gt=0)
    pallet_gap: Span = (0.05, 0.20)
    pallet_depth: Span = (0.05, 0.15)
    circle_radius: Span = (0.35, 0.15)
    circle_gap: Span = (0.05, 0.25)
    circle_max_height: Span = (0.0, 0.06)
    pit_size: Span = (0.15, 0.60)
    pit_spacing: float = Field(1.2, gt=0)
    pit_jitter: float = Field(0.2, ge=0)
    gap_width_per_level: float = Field(0.05, gt=0)
    gap_spacing: float = Field(1.5, gt=0)


class ObservationConfig(_Frozen):
    rows: int = 17
    cols: int = 11
    pitch: float = 0.1
    footmap_weight: float = 10.0
    footmap_sigma: float = Field(0.1, gt=0)
    deep_void: float = -1.0

    @model_validator(mode="after")
    def _fixed_grid(self) -> "ObservationConfig":
        if (self.rows, self.cols) != (17, 11) or not math.isclose(self.pitch, 0.1):
            raise ValueError("heightmap grid is fixed at 17x11 with 0.1 m pitch")
        return self


class EncoderConfig(_Frozen):
    d_model: int = 64
    n_heads: int = 4
    cnn_channels: int = 16
    kernel_size: int = 5
    proprio_dim: int = 48
    param_seed: int = 0

    @model_validator(mode="after")
    def _heads_divide(self) -> "EncoderConfig":
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd for same-padding")
        return self


class RewardWeights(_Frozen):
    lin_vel_track: float = 1.5
    ang_vel_track: float = 0.5
    z_vel_penalty: float = 1.0
    ang_vel_penalty: float = 0.05
    torque: float = 1e-4
    joint_accel: float = 2.5e-7
    base_height: float = 1.0
    action_rate: float = 0.03
    collisions: float = 1.0
    stumble: float = 0.1
    joint_error: float = 0.04
    stability: float = 1.0


class RewardConfig(_Frozen):
    weights: RewardWeights = RewardWeights()
    z_target: float = 0.35
    tracking_sigma: float = Field(0.5, gt=0)
    stumble_ratio: float = 5.0
    stability_kind: Literal["cop", "com", "capture_point"] = "cop"
    stability_penalty: float = -1.0
    gravity: float = Field(9.81, gt=0)


class LegConfig(_Frozen):
    hip_x: float = 0.183
    hip_y: float = 0.047
    l1: float = Field(0.08505, ge=0)
    l2: float = Field(0.2, gt=0)
    l3: float = Field(0.2, gt=0)


class ControlConfig(_Frozen):
    action_scale: float = 0.25
    kp: float = 40.0
    kd: float = 1.0
    torque_limit: float = Field(33.5, gt=0)
    # FR, FL, RR, RL x (abduction, hip, knee)
    q_default: Tuple[float, ...] = (0.0, 0.8, -1.6) * 4
    leg: LegConfig = LegConfig()
    abduction_limits: Tuple[float, float] = (-0.802851, 0.802851)
    hip_limits: Tuple[float, float] = (-1.0472, 4.18879)
    knee_limits: Tuple[float, float] = (-2.69653, -0.916298)
    speed_range: Tuple[float, float] = (0.1, 1.0)
    heading_range: Tuple[float, float] = (-math.pi, math.pi)
    yaw_rate_range: Tuple[float, float] = (-0.5, 0.5)

    @model_validator(mode="after")
    def _twelve_joints(self) -> "ControlConfig":
        if len(self.q_default) != 12:
            raise ValueError("q_default must hold 12 joint angles")
        return self


class HarnessConfig(_Frozen):
    dt: float = Field(0.02, gt=0)
    duration: float = Field(20.0, gt=0)
    base_clearance: float = 0.10
    contact_tolerance: float = Field(0.02, ge=0)
    joint_time_constant: float = Field(0.05, gt=0)
    total_mass: float = Field(12.0, gt=0)
    gravity: float = Field(9.81, gt=0)
    gait_slip: float = Field(0.0, ge=0, lt=1)
    tile_width: float = Field(4.0, gt=0)
    tile_margin: float = Field(3.0, ge=0)
    # per-episode start jitter on the spawn platform
    spawn_jitter: float = Field(0.25, ge=0)
    yaw_jitter: float = Field(0.1, ge=0)
    trot_frequency: float = Field(2.0, gt=0)
    trot_hip_lift: float = 0.3
    trot_knee_lift: float = 0.6
    min_distance: float = 4.0
    sweep_speeds: Tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(1, 11))


class RandomizationConfig(_Frozen):
    friction: Span = (0.5, 1.25)
    restitution: Span = (0.0, 0.8)
    link_mass_scale: Span = (0.9, 1.1)
    payload_mass: Span = (-1.0, 2.0)
    com_offset: Span = (-0.05, 0.05)
    motor_strength: Span = (0.9, 1.1)
    kp_scale: Span = (0.9, 1.1)
    kd_scale: Span = (0.9, 1.1)
    init_joint_scale: Span = (0.5, 1.5)
    system_delay_ms: Span = (0.0, 40.0)
    external_force: Span = (-30.0, 30.0)
    heightmap_drift: Span = (-0.05, 0.05)


class KernelConfig(_Frozen):
    profile: str = "default"
    terrain: TerrainConfig = TerrainConfig()
    observation: ObservationConfig = ObservationConfig()
    encoder: EncoderConfig = EncoderConfig()
    reward: RewardConfig = RewardConfig()
    control: ControlConfig = ControlConfig()
    harness: HarnessConfig = HarnessConfig()
    randomization: RandomizationConfig = RandomizationConfig()


DEFAULT_CONFIG = KernelConfig()


def load_config(profile: str = "default", path: Optional[Path] = None) -> KernelConfig:
    """Load a kernel configuration profile.

    ``path`` wins over ``profile``; without either file the built-in defaults
    are returned.
    """
    config_path = Path(path) if path else CONFIG_DIR / f"{profile}.yaml"
    if not config_path.exists():
        if path:
            raise InvalidArgumentError(f"config file not found: {config_path}")
        logger.debug(f"No config file for profile '{profile}', using defaults")
        return KernelConfig(profile=profile)

    with open(config_path, "r") as f:
        data: Dict[str, Any] = yaml.safe_load(f) or {}
    data.setdefault("profile", profile)
    try:
        return KernelConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidArgumentError(f"invalid config {config_path}: {e}") from e


def list_profiles() -> list[str]:
    """Profiles available under the config directory."""
    if not CONFIG_DIR.exists():
        return []
    return sorted(p.stem for p in CONFIG_DIR.glob("*.yaml"))
