"""Procedural terrain tiles for the training curriculum and OOD evaluation.

Every generator is a pure function of (kind, level, extent, seed): the tile is
centred on the world origin, sampled at a fixed 0.05 m resolution, and a flat
spawn square of ``platform_margin`` around the origin is forced to height 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.interpolate import RegularGridInterpolator

from locokernel.config import DEFAULT_CONFIG, TerrainConfig, lerp_level
from locokernel.errors import InvalidArgumentError
from locokernel.terrain.heightfield import Heightfield
from locokernel.terrain.spec import StoneParams, TerrainKind, TerrainSpec, stones_params

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]
Layer = Tuple[FloatArray, BoolArray]

_KIND_SALT = {kind: idx for idx, kind in enumerate(TerrainKind)}


def _cell_span(lo: float, hi: float, origin: float, res: float, n: int) -> slice:
    """Indices of cells whose centres fall inside [lo, hi]."""
    start = max(0, math.ceil((lo - origin) / res - 1e-9))
    stop = min(n, math.floor((hi - origin) / res + 1e-9) + 1)
    return slice(start, max(start, stop))


def _lattice(pitch: float, coords: FloatArray) -> Tuple[int, int]:
    """Integer lattice index range covering ``coords`` with one cell of slack."""
    return (
        math.floor(float(coords.min()) / pitch) - 1,
        math.ceil(float(coords.max()) / pitch) + 1,
    )


@dataclass(frozen=True, eq=False)
class TileGrid:
    """Cell-centre coordinates of one tile; ``X``/``Y`` are (rows, cols)."""

    origin: Tuple[float, float]
    resolution: float
    X: FloatArray
    Y: FloatArray

    @classmethod
    def for_extent(cls, extent: Tuple[float, float], resolution: float) -> "TileGrid":
        """Odd-sized grid centred on the world origin covering ``extent``."""
        rows = 2 * math.ceil(extent[0] / (2 * resolution)) + 1
        cols = 2 * math.ceil(extent[1] / (2 * resolution)) + 1
        origin = (-(rows - 1) / 2 * resolution, -(cols - 1) / 2 * resolution)
        xs = origin[0] + np.arange(rows) * resolution
        ys = origin[1] + np.arange(cols) * resolution
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return cls(origin=origin, resolution=resolution, X=X, Y=Y)

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.X.shape[0]), int(self.X.shape[1]))

    def flat(self) -> Layer:
        return np.zeros(self.shape), np.zeros(self.shape, dtype=bool)

    def rows_between(self, lo: float, hi: float) -> slice:
        return _cell_span(lo, hi, self.origin[0], self.resolution, self.shape[0])

    def cols_between(self, lo: float, hi: float) -> slice:
        return _cell_span(lo, hi, self.origin[1], self.resolution, self.shape[1])


Generator = Callable[[TerrainSpec, np.random.Generator, TileGrid], Layer]


class TerrainGenerator:
    """Builds heightfields for every terrain kind from a :class:`TerrainConfig`.

    Holds only the config; per-tile grids are passed through the generators,
    so one instance can serve concurrent callers.
    """

    def __init__(self, config: TerrainConfig = DEFAULT_CONFIG.terrain):
        self.config = config
        self._generators: Dict[TerrainKind, Generator] = {
            TerrainKind.SMOOTH: self._smooth,
            TerrainKind.ROUGH: self._rough,
            TerrainKind.DISCRETE: self._discrete,
            TerrainKind.STAIRS_UP: self._stairs_up,
            TerrainKind.STAIRS_DOWN: self._stairs_down,
            TerrainKind.STONES: self._stones,
            TerrainKind.BEAMS: self._beams,
            TerrainKind.PALLETS: self._pallets,
            TerrainKind.CIRCLES: self._circles,
            TerrainKind.SMALL_STONES: self._small_stones,
            TerrainKind.PITS: self._pits,
            TerrainKind.GAPS: self._gaps,
        }

    # ------------------------------------------------------------------ public

    def generate(self, spec: TerrainSpec) -> Heightfield:
        """Generate the heightfield for ``spec``."""
        if min(spec.extent) < 2 * spec.platform_margin:
            raise InvalidArgumentError(
                f"extent {spec.extent} smaller than twice the platform margin {spec.platform_margin}"
            )
        grid = TileGrid.for_extent(spec.extent, self.config.resolution)

        if spec.kind is TerrainKind.COMBO:
            assert spec.components is not None
            base_kind, overlay_kind = spec.components
            heights, void = self._layer(base_kind, spec, grid)
            overlay_h, overlay_void = self._layer(overlay_kind, spec, grid)
            heights = heights + np.where(overlay_void, 0.0, overlay_h)
        else:
            heights, void = self._layer(spec.kind, spec, grid)

        heights = np.where(void, 0.0, heights)
        platform = (np.abs(grid.X) <= spec.platform_margin) & (np.abs(grid.Y) <= spec.platform_margin)
        heights[platform] = 0.0
        void = void & ~platform

        hf = Heightfield(origin=grid.origin, resolution=grid.resolution, heights=heights, void=void)
        logger.debug(
            f"Generated {spec.name} level {spec.level} seed {spec.seed}: "
            f"{hf.rows}x{hf.cols} cells, {int(void.sum())} void"
        )
        return hf

    # ---------------------------------------------------------------- helpers

    def _layer(self, kind: TerrainKind, spec: TerrainSpec, grid: TileGrid) -> Layer:
        rng = np.random.default_rng([spec.seed, _KIND_SALT[kind], spec.level])
        heights, void = self._generators[kind](spec, rng, grid)
        return heights.astype(np.float64), void.astype(bool)

    # -------------------------------------------------------- training kinds

    def _smooth(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        return grid.flat()

    def _rough(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        amplitude = lerp_level(cfg.rough_amplitude, spec.level)
        levels = np.clip(
            np.arange(-amplitude, amplitude + cfg.rough_step / 2, cfg.rough_step),
            -amplitude,
            amplitude,
        )
        x0, x1 = float(grid.X.min()), float(grid.X.max())
        y0, y1 = float(grid.Y.min()), float(grid.Y.max())
        xc = x0 + cfg.rough_scale * np.arange(math.ceil((x1 - x0) / cfg.rough_scale) + 1)
        yc = y0 + cfg.rough_scale * np.arange(math.ceil((y1 - y0) / cfg.rough_scale) + 1)
        lattice = rng.choice(levels, size=(len(xc), len(yc)))
        interp = RegularGridInterpolator(
            (xc, yc), lattice, method="linear", bounds_error=False, fill_value=None
        )
        points = np.stack([grid.X.ravel(), grid.Y.ravel()], axis=-1)
        heights = np.clip(interp(points).reshape(grid.X.shape), -amplitude, amplitude)
        return heights, np.zeros(grid.X.shape, dtype=bool)

    def _discrete(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        h = lerp_level(cfg.discrete_height, spec.level)
        heights, void = grid.flat()
        n_blocks = int(round(cfg.discrete_density * spec.extent[0] * spec.extent[1]))
        half_x, half_y = spec.extent[0] / 2, spec.extent[1] / 2
        centers = rng.uniform((-half_x, -half_y), (half_x, half_y), size=(n_blocks, 2))
        sizes = rng.uniform(cfg.discrete_size[0], cfg.discrete_size[1], size=(n_blocks, 2))
        tops = rng.choice(np.array([-h, -h / 2, h / 2, h]), size=n_blocks)
        for (cx, cy), (sx, sy), top in zip(centers, sizes, tops):
            si = grid.rows_between(cx - sx / 2, cx + sx / 2)
            sj = grid.cols_between(cy - sy / 2, cy + sy / 2)
            heights[si, sj] = top
        return heights, void

    def _stairs(self, spec: TerrainSpec, grid: TileGrid, sign: float) -> Layer:
        cfg = self.config
        rise = lerp_level(cfg.stair_rise, spec.level)
        ring = np.maximum(np.abs(grid.X), np.abs(grid.Y)) - spec.platform_margin
        steps = np.where(ring > 0, np.ceil(ring / cfg.stair_width), 0.0)
        return sign * rise * steps, np.zeros(grid.X.shape, dtype=bool)

    def _stairs_up(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        return self._stairs(spec, grid, 1.0)

    def _stairs_down(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        return self._stairs(spec, grid, -1.0)

    def _stone_field(self, params: StoneParams, rng: np.random.Generator, grid: TileGrid) -> Layer:
        heights = np.zeros(grid.X.shape)
        void = np.ones(grid.X.shape, dtype=bool)
        pitch = params.stone_size + params.stone_gap
        a0, a1 = _lattice(pitch, grid.X)
        b0, b1 = _lattice(pitch, grid.Y)
        na, nb = a1 - a0 + 1, b1 - b0 + 1
        shifts = rng.uniform(-params.max_shift, params.max_shift, size=(na, nb, 2))
        tops = rng.uniform(-params.max_height, params.max_height, size=(na, nb))
        half = params.stone_size / 2
        for ia in range(na):
            for ib in range(nb):
                cx = (a0 + ia) * pitch + shifts[ia, ib, 0]
                cy = (b0 + ib) * pitch + shifts[ia, ib, 1]
                si = grid.rows_between(cx - half, cx + half)
                sj = grid.cols_between(cy - half, cy + half)
                heights[si, sj] = tops[ia, ib]
                void[si, sj] = False
        return heights, void

    def _stones(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        return self._stone_field(stones_params(spec.level, self.config.stones), rng, grid)

    # ------------------------------------------------------------- OOD kinds

    def _small_stones(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        return self._stone_field(stones_params(spec.level, self.config.small_stones), rng, grid)

    def _beams(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        width = lerp_level(cfg.beam_width, spec.level)
        pitch = width + lerp_level(cfg.beam_gap, spec.level)
        b0, b1 = _lattice(pitch, grid.Y)
        offsets = rng.uniform(-cfg.beam_max_height, cfg.beam_max_height, size=b1 - b0 + 1)
        nearest = np.round(grid.Y / pitch).astype(np.int64)
        void = np.abs(grid.Y - nearest * pitch) > width / 2
        heights = offsets[nearest - b0]
        return heights, void

    def _pallets(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        slat = cfg.pallet_slat_width
        pitch = slat + lerp_level(cfg.pallet_gap, spec.level)
        depth = lerp_level(cfg.pallet_depth, spec.level)
        nearest = np.round(grid.X / pitch)
        on_slat = np.abs(grid.X - nearest * pitch) <= slat / 2
        heights = np.where(on_slat, 0.0, -depth)
        return heights, np.zeros(grid.X.shape, dtype=bool)

    def _circles(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        radius = lerp_level(cfg.circle_radius, spec.level)
        pitch = 2 * radius + lerp_level(cfg.circle_gap, spec.level)
        max_height = lerp_level(cfg.circle_max_height, spec.level)
        a0, a1 = _lattice(pitch, grid.X)
        b0, b1 = _lattice(pitch, grid.Y)
        tops = rng.uniform(-max_height, max_height, size=(a1 - a0 + 1, b1 - b0 + 1))
        ia = np.round(grid.X / pitch).astype(np.int64)
        ib = np.round(grid.Y / pitch).astype(np.int64)
        dist = np.hypot(grid.X - ia * pitch, grid.Y - ib * pitch)
        void = dist > radius
        return tops[ia - a0, ib - b0], void

    def _pits(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        size = lerp_level(cfg.pit_size, spec.level)
        heights, void = grid.flat()
        a0, a1 = _lattice(cfg.pit_spacing, grid.X)
        b0, b1 = _lattice(cfg.pit_spacing, grid.Y)
        jitter = rng.uniform(-cfg.pit_jitter, cfg.pit_jitter, size=(a1 - a0 + 1, b1 - b0 + 1, 2))
        for ia in range(a1 - a0 + 1):
            for ib in range(b1 - b0 + 1):
                # pits sit between lattice rows so the spawn square stays clear
                cx = (a0 + ia + 0.5) * cfg.pit_spacing + jitter[ia, ib, 0]
                cy = (b0 + ib + 0.5) * cfg.pit_spacing + jitter[ia, ib, 1]
                si = grid.rows_between(cx - size / 2, cx + size / 2)
                sj = grid.cols_between(cy - size / 2, cy + size / 2)
                void[si, sj] = True
        return heights, void

    def _gaps(self, spec: TerrainSpec, rng: np.random.Generator, grid: TileGrid) -> Layer:
        cfg = self.config
        width = cfg.gap_width_per_level * (spec.level + 1)
        nearest = np.round(grid.X / cfg.gap_spacing)
        void = (np.abs(grid.X - nearest * cfg.gap_spacing) <= width / 2 + 1e-9) & (nearest != 0)
        return np.zeros(grid.X.shape), void


def generate_terrain(spec: TerrainSpec, config: Optional[TerrainConfig] = None) -> Heightfield:
    """Generate the heightfield described by ``spec``."""
    return TerrainGenerator(config or DEFAULT_CONFIG.terrain).generate(spec)
