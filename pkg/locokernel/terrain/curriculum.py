"""Terrain curriculum: level promotion/demotion and the evaluation tile grid."""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from locokernel.config import MAX_LEVEL
from locokernel.errors import InvalidArgumentError
from locokernel.terrain.spec import OOD_COMBOS, OOD_KINDS, TRAINING_KINDS, TerrainKind, TerrainSpec

logger = logging.getLogger(__name__)

KindLike = Union[TerrainKind, Tuple[TerrainKind, TerrainKind], str]


def terrain_curriculum_update(
    level: npt.ArrayLike,
    distance: npt.ArrayLike,
    command_distance: npt.ArrayLike,
    tile_length: float,
) -> npt.NDArray[np.int64]:
    """Next curriculum level for each environment.

    Robots that walked past half the tile move up one level; robots that
    covered less than half their commanded distance move down. Levels stay
    within 0..9.
    """
    if tile_length <= 0:
        raise InvalidArgumentError(f"tile_length must be > 0, got {tile_length}")
    levels = np.asarray(level, dtype=np.int64)
    dist = np.asarray(distance, dtype=float)
    expected = np.asarray(command_distance, dtype=float)
    move_up = dist > tile_length / 2
    move_down = (dist < 0.5 * expected) & ~move_up
    return np.clip(levels + move_up.astype(np.int64) - move_down.astype(np.int64), 0, MAX_LEVEL)


class TerrainCurriculum:
    """Per-environment terrain levels updated after every episode."""

    def __init__(
        self,
        num_envs: int,
        kinds: Sequence[TerrainKind] = TRAINING_KINDS,
        max_init_level: int = 0,
        seed: int = 0,
    ):
        if num_envs < 1:
            raise InvalidArgumentError("num_envs must be >= 1")
        if not 0 <= max_init_level <= MAX_LEVEL:
            raise InvalidArgumentError(f"max_init_level must be in [0, {MAX_LEVEL}]")
        rng = np.random.default_rng(seed)
        self.kinds = tuple(kinds)
        self.levels = rng.integers(0, max_init_level + 1, size=num_envs)
        # environments are spread evenly over the terrain kinds
        self.kind_index = np.arange(num_envs) % len(self.kinds)

    def update(
        self,
        env_ids: npt.ArrayLike,
        distance: npt.ArrayLike,
        command_distance: npt.ArrayLike,
        tile_length: float,
    ) -> npt.NDArray[np.int64]:
        ids = np.asarray(env_ids, dtype=np.int64)
        self.levels[ids] = terrain_curriculum_update(
            self.levels[ids], distance, command_distance, tile_length
        )
        logger.debug(f"Curriculum mean level {float(self.levels.mean()):.2f}")
        return self.levels[ids]

    def spec_for(self, env_id: int, extent: Tuple[float, float], seed: int) -> TerrainSpec:
        """Terrain spec for an environment's current kind and level."""
        return TerrainSpec(
            kind=self.kinds[self.kind_index[env_id]],
            level=int(self.levels[env_id]),
            extent=extent,
            seed=seed,
        )


def tile_seed(seed: int, kind_index: int, level: int) -> int:
    """Deterministic 64-bit seed for one (kind, level) tile."""
    state = np.random.SeedSequence([seed, kind_index, level]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def curriculum_specs(
    kinds: Optional[Sequence[KindLike]] = None,
    levels: Sequence[int] = tuple(range(MAX_LEVEL + 1)),
    seed: int = 0,
    extent: Optional[Tuple[float, float]] = None,
) -> List[TerrainSpec]:
    """Grid of terrain specs over ``kinds`` x ``levels``.

    ``kinds`` defaults to the six training kinds; ``"ood"`` expands to the
    OOD kinds plus the stones/rough/stairs combos.
    """
    if kinds is None:
        kinds = TRAINING_KINDS
    expanded: List[KindLike] = []
    for kind in kinds:
        if kind == "ood":
            expanded.extend(OOD_KINDS)
            expanded.extend(OOD_COMBOS)
        else:
            expanded.append(kind)

    extra = {} if extent is None else {"extent": extent}
    specs: List[TerrainSpec] = []
    for k, kind in enumerate(expanded):
        for level in levels:
            s = tile_seed(seed, k, level)
            if isinstance(kind, tuple):
                specs.append(
                    TerrainSpec(kind=TerrainKind.COMBO, level=level, seed=s, components=kind, **extra)  # type: ignore[arg-type]
                )
            elif isinstance(kind, TerrainKind):
                specs.append(TerrainSpec(kind=kind, level=level, seed=s, **extra))  # type: ignore[arg-type]
            else:
                specs.append(TerrainSpec.from_name(kind, level, seed=s, **extra))
    return specs
