"""Terrain kinds, tile specifications and the stepping-stone difficulty table."""

from dataclasses import dataclass
from enum import Enum
from numbers import Integral
from typing import Optional, Tuple

from locokernel.config import DEFAULT_CONFIG, MAX_LEVEL, StoneTable, lerp_level
from locokernel.errors import InvalidArgumentError

SEED_MASK = (1 << 64) - 1


class TerrainKind(str, Enum):
    SMOOTH = "smooth"
    ROUGH = "rough"
    DISCRETE = "discrete"
    STAIRS_UP = "stairs_up"
    STAIRS_DOWN = "stairs_down"
    STONES = "stones"
    BEAMS = "beams"
    PALLETS = "pallets"
    CIRCLES = "circles"
    SMALL_STONES = "small_stones"
    PITS = "pits"
    GAPS = "gaps"
    COMBO = "combo"

    @property
    def is_atomic(self) -> bool:
        return self is not TerrainKind.COMBO


TRAINING_KINDS = (
    TerrainKind.SMOOTH,
    TerrainKind.ROUGH,
    TerrainKind.DISCRETE,
    TerrainKind.STAIRS_UP,
    TerrainKind.STAIRS_DOWN,
    TerrainKind.STONES,
)

OOD_KINDS = (
    TerrainKind.BEAMS,
    TerrainKind.PALLETS,
    TerrainKind.CIRCLES,
    TerrainKind.SMALL_STONES,
    TerrainKind.PITS,
    TerrainKind.GAPS,
)

# evaluation combos: stones, rough and stairs mixed
OOD_COMBOS = (
    (TerrainKind.STONES, TerrainKind.ROUGH),
    (TerrainKind.STONES, TerrainKind.STAIRS_UP),
    (TerrainKind.STONES, TerrainKind.STAIRS_DOWN),
    (TerrainKind.STAIRS_UP, TerrainKind.ROUGH),
    (TerrainKind.STAIRS_DOWN, TerrainKind.ROUGH),
)


@dataclass(frozen=True)
class TerrainSpec:
    """One terrain tile request: kind, difficulty level 0-9, size and seed."""

    kind: TerrainKind
    level: int
    extent: Tuple[float, float] = DEFAULT_CONFIG.terrain.extent
    seed: int = 0
    platform_margin: float = DEFAULT_CONFIG.terrain.platform_margin
    components: Optional[Tuple[TerrainKind, TerrainKind]] = None

    def __post_init__(self) -> None:
        kind = TerrainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if isinstance(self.level, bool) or not isinstance(self.level, Integral):
            raise InvalidArgumentError(f"level must be an integer, got {self.level!r}")
        object.__setattr__(self, "level", int(self.level))
        if not 0 <= self.level <= MAX_LEVEL:
            raise InvalidArgumentError(f"level must be in [0, {MAX_LEVEL}], got {self.level}")
        if self.extent[0] <= 0 or self.extent[1] <= 0:
            raise InvalidArgumentError(f"extent must be positive, got {self.extent}")
        if self.platform_margin < 0:
            raise InvalidArgumentError("platform_margin must be >= 0")
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))
        object.__setattr__(self, "seed", int(self.seed) & SEED_MASK)

        if kind is TerrainKind.COMBO:
            if self.components is None or len(self.components) != 2:
                raise InvalidArgumentError("combo terrain needs exactly two component kinds")
            parts = (TerrainKind(self.components[0]), TerrainKind(self.components[1]))
            if not all(p.is_atomic for p in parts):
                raise InvalidArgumentError("combo components must be atomic kinds")
            object.__setattr__(self, "components", parts)
        elif self.components is not None:
            raise InvalidArgumentError(f"components only apply to combo terrain, not {kind.value}")

    @property
    def name(self) -> str:
        if self.kind is TerrainKind.COMBO and self.components:
            return "+".join(p.value for p in self.components)
        return self.kind.value

    @classmethod
    def from_name(cls, name: str, level: int, **kwargs: object) -> "TerrainSpec":
        """Build a spec from ``"stones"`` or ``"stones+rough"`` style names."""
        parts = [p.strip() for p in name.split("+") if p.strip()]
        try:
            kinds = [TerrainKind(p) for p in parts]
        except ValueError as e:
            raise InvalidArgumentError(f"unknown terrain kind in {name!r}") from e
        if len(kinds) == 1:
            return cls(kind=kinds[0], level=level, **kwargs)  # type: ignore[arg-type]
        if len(kinds) == 2:
            return cls(
                kind=TerrainKind.COMBO,
                level=level,
                components=(kinds[0], kinds[1]),
                **kwargs,  # type: ignore[arg-type]
            )
        raise InvalidArgumentError(f"combo terrain takes two kinds, got {name!r}")


@dataclass(frozen=True)
class StoneParams:
    """Stepping-stone layout at one difficulty level, meters."""

    stone_size: float
    stone_gap: float
    max_shift: float
    max_height: float


def stones_params(level: int, table: StoneTable = DEFAULT_CONFIG.terrain.stones) -> StoneParams:
    """Stone parameters for ``level``; endpoints exact, interior levels linear."""
    if isinstance(level, bool) or not isinstance(level, Integral):
        raise InvalidArgumentError(f"level must be an integer, got {level!r}")
    return StoneParams(
        stone_size=lerp_level(table.stone_size, level),
        stone_gap=lerp_level(table.stone_gap, level),
        max_shift=lerp_level(table.max_shift, level),
        max_height=lerp_level(table.max_height, level),
    )
