"""Terrain generation: heightfields, curriculum and OOD evaluation tiles."""

from locokernel.terrain.curriculum import (
    TerrainCurriculum,
    curriculum_specs,
    terrain_curriculum_update,
)
from locokernel.terrain.generator import TerrainGenerator, generate_terrain
from locokernel.terrain.heightfield import (
    Heightfield,
    height_at,
    parse_heightfield,
    read_heightfield,
    write_heightfield,
)
from locokernel.terrain.spec import (
    OOD_COMBOS,
    OOD_KINDS,
    TRAINING_KINDS,
    StoneParams,
    TerrainKind,
    TerrainSpec,
    stones_params,
)

__all__ = [
    "Heightfield",
    "OOD_COMBOS",
    "OOD_KINDS",
    "StoneParams",
    "TRAINING_KINDS",
    "TerrainCurriculum",
    "TerrainGenerator",
    "TerrainKind",
    "TerrainSpec",
    "curriculum_specs",
    "generate_terrain",
    "height_at",
    "parse_heightfield",
    "read_heightfield",
    "stones_params",
    "terrain_curriculum_update",
    "write_heightfield",
]
