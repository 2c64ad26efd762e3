"""Scripted policies for exercising the harness without a learned network.

Both scripted gaits are open loop. ``blind_trot`` is an alias of ``trot``
kept as the explicit name for terrain-blind baselines; neither reads the
heightmap, so both declare ``needs_frame = False`` and the rollout skips
building observations for them.
"""

import logging
from typing import Callable, Dict, Optional, Protocol

import numpy as np
import numpy.typing as npt

from locokernel.config import DEFAULT_CONFIG, KernelConfig
from locokernel.errors import InvalidArgumentError
from locokernel.observation.frame import ObservationFrame

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

SCRIPTED_PREFIX = "scripted:"

# diagonal leg pairs, FR+RL and FL+RR
_PAIRS = ((0, 3), (1, 2))


class Policy(Protocol):
    def __call__(self, frame: Optional[ObservationFrame]) -> npt.ArrayLike: ...


class StandPolicy:
    """Zero action: hold the default pose."""

    name = "stand"
    needs_frame = False

    def reset(self) -> None:
        pass

    def __call__(self, frame: Optional[ObservationFrame]) -> FloatArray:
        return np.zeros(12)


class TrotPolicy:
    """Open-loop trot alternating diagonal pairs; ignores the terrain entirely."""

    name = "trot"
    needs_frame = False

    def __init__(self, config: KernelConfig = DEFAULT_CONFIG):
        h = config.harness
        self.dt = h.dt
        self.frequency = h.trot_frequency
        scale = config.control.action_scale
        self.hip_action = h.trot_hip_lift / scale
        self.knee_action = -h.trot_knee_lift / scale
        self.step = 0

    def reset(self) -> None:
        self.step = 0

    def swing_pair(self, step: int) -> int:
        phase = (step * self.dt * self.frequency) % 1.0
        return 0 if phase < 0.5 else 1

    def __call__(self, frame: Optional[ObservationFrame]) -> FloatArray:
        action = np.zeros(12)
        for leg in _PAIRS[self.swing_pair(self.step)]:
            action[3 * leg + 1] = self.hip_action
            action[3 * leg + 2] = self.knee_action
        self.step += 1
        return action


_REGISTRY: Dict[str, Callable[[KernelConfig], Policy]] = {
    "stand": lambda cfg: StandPolicy(),
    "trot": TrotPolicy,
    "blind_trot": TrotPolicy,
}

POLICY_HELP = (
    "Scripted policy: scripted:stand, scripted:trot, or scripted:blind_trot "
    "(alias of trot; the open-loop gait never reads the heightmap)"
)


def available_policies() -> list[str]:
    return [SCRIPTED_PREFIX + name for name in _REGISTRY]


def make_policy(name: str, config: KernelConfig = DEFAULT_CONFIG) -> Policy:
    """Build a policy from ``scripted:<name>`` (the prefix is optional)."""
    key = name[len(SCRIPTED_PREFIX) :] if name.startswith(SCRIPTED_PREFIX) else name
    if key not in _REGISTRY:
        raise InvalidArgumentError(f"unknown policy {name!r}; available: {', '.join(available_policies())}")
    return _REGISTRY[key](config)
