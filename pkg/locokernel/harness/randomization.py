"""Per-episode domain randomization draws."""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple

import numpy as np

from locokernel.config import DEFAULT_CONFIG, RandomizationConfig

logger = logging.getLogger(__name__)

Vec3 = Tuple[float, float, float]


@dataclass(frozen=True)
class RandomizedParams:
    friction: float = 1.0
    restitution: float = 0.0
    link_mass_scale: float = 1.0
    payload_mass: float = 0.0
    com_offset: Vec3 = (0.0, 0.0, 0.0)
    motor_strength: float = 1.0
    kp_scale: float = 1.0
    kd_scale: float = 1.0
    init_joint_scale: float = 1.0
    system_delay_ms: float = 0.0
    external_force: Vec3 = (0.0, 0.0, 0.0)
    heightmap_drift: Vec3 = (0.0, 0.0, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    def delay_steps(self, dt: float) -> int:
        return int(round(self.system_delay_ms / 1000.0 / dt))


NOMINAL_PARAMS = RandomizedParams()


def domain_randomize(
    rng: np.random.Generator, config: RandomizationConfig = DEFAULT_CONFIG.randomization
) -> RandomizedParams:
    """One uniform draw of every parameter over its configured range."""

    def scalar(span: Tuple[float, float]) -> float:
        return float(rng.uniform(span[0], span[1]))

    def vec3(span: Tuple[float, float]) -> Vec3:
        x, y, z = rng.uniform(span[0], span[1], size=3)
        return (float(x), float(y), float(z))

    return RandomizedParams(
        friction=scalar(config.friction),
        restitution=scalar(config.restitution),
        link_mass_scale=scalar(config.link_mass_scale),
        payload_mass=scalar(config.payload_mass),
        com_offset=vec3(config.com_offset),
        motor_strength=scalar(config.motor_strength),
        kp_scale=scalar(config.kp_scale),
        kd_scale=scalar(config.kd_scale),
        init_joint_scale=scalar(config.init_joint_scale),
        system_delay_ms=scalar(config.system_delay_ms),
        external_force=vec3(config.external_force),
        heightmap_drift=vec3(config.heightmap_drift),
    )
