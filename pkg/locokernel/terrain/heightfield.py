"""Heightfield grid, nearest-cell lookup and the HF v1 text format."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from locokernel.errors import InvalidArgumentError, OutOfBoundsError, ParseError
from locokernel.util.fs import atomic_write_lines

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

HF_MAGIC = "HF"
HF_VERSION = "v1"
VOID_TOKEN = "void"


@dataclass(frozen=True, eq=False)
class Heightfield:
    """World-frame elevation grid.

    ``heights[i, j]`` is the elevation of the cell centred at
    ``origin + (i, j) * resolution``; rows run along world x, columns along
    world y. ``void`` marks bottomless cells (gaps, pits, between stones).
    Arrays are frozen after construction so instances can be shared.
    """

    origin: Tuple[float, float]
    resolution: float
    heights: FloatArray
    void: BoolArray

    def __post_init__(self) -> None:
        heights = np.array(self.heights, dtype=np.float64)
        void = np.array(self.void, dtype=bool)
        if not self.resolution > 0:
            raise InvalidArgumentError(f"resolution must be > 0, got {self.resolution}")
        if heights.ndim != 2 or heights.shape[0] < 1 or heights.shape[1] < 1:
            raise InvalidArgumentError(f"heights must be a non-empty 2D grid, got {heights.shape}")
        if void.shape != heights.shape:
            raise InvalidArgumentError("void mask must match the heights grid")
        if not np.all(np.isfinite(heights)):
            raise InvalidArgumentError("heights must be finite")
        heights.flags.writeable = False
        void.flags.writeable = False
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "void", void)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "resolution", float(self.resolution))

    @property
    def rows(self) -> int:
        return int(self.heights.shape[0])

    @property
    def cols(self) -> int:
        return int(self.heights.shape[1])

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """(x_min, x_max, y_min, y_max) of the covered area, cell edges included."""
        half = 0.5 * self.resolution
        ox, oy = self.origin
        return (
            ox - half,
            ox + (self.rows - 0.5) * self.resolution,
            oy - half,
            oy + (self.cols - 0.5) * self.resolution,
        )

    def cell_centers(self) -> Tuple[FloatArray, FloatArray]:
        """World x of every row and world y of every column."""
        xs = self.origin[0] + np.arange(self.rows) * self.resolution
        ys = self.origin[1] + np.arange(self.cols) * self.resolution
        return xs, ys

    def cell_index(self, x: npt.ArrayLike, y: npt.ArrayLike) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        """Nearest-cell indices for world points; raises when any point is outside."""
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
            raise OutOfBoundsError("query coordinates must be finite")
        i = np.floor((xa - self.origin[0]) / self.resolution + 0.5).astype(np.int64)
        j = np.floor((ya - self.origin[1]) / self.resolution + 0.5).astype(np.int64)
        outside = (i < 0) | (i >= self.rows) | (j < 0) | (j >= self.cols)
        if np.any(outside):
            k = int(np.argmax(outside.ravel()))
            raise OutOfBoundsError(
                f"point ({xa.ravel()[k]:.4f}, {ya.ravel()[k]:.4f}) outside heightfield "
                f"bounds {tuple(round(b, 4) for b in self.bounds)}"
            )
        return i, j

    def sample(self, x: npt.ArrayLike, y: npt.ArrayLike) -> Tuple[FloatArray, BoolArray]:
        """Vectorised nearest-cell lookup returning (heights, void mask)."""
        i, j = self.cell_index(x, y)
        return self.heights[i, j], self.void[i, j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Heightfield):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.resolution == other.resolution
            and np.array_equal(self.heights, other.heights)
            and np.array_equal(self.void, other.void)
        )

    __hash__ = None  # type: ignore[assignment]


def height_at(hf: Heightfield, x: float, y: float) -> Optional[float]:
    """Height of the cell containing (x, y); ``None`` when that cell is void."""
    heights, void = hf.sample(x, y)
    if bool(void):
        return None
    return float(heights)


def _format_row(heights: FloatArray, void: BoolArray) -> str:
    return " ".join(
        VOID_TOKEN if v else repr(float(h)) for h, v in zip(heights, void)
    )


def heightfield_lines(hf: Heightfield) -> Iterator[str]:
    """HF v1 text lines: header, then one grid row per line."""
    ox, oy = hf.origin
    yield (
        f"{HF_MAGIC} {HF_VERSION} {hf.rows} {hf.cols} "
        f"{hf.resolution!r} {ox!r} {oy!r}"
    )
    for i in range(hf.rows):
        yield _format_row(hf.heights[i], hf.void[i])


def write_heightfield(hf: Heightfield, path: Union[str, Path]) -> Path:
    """Write ``hf`` in the HF v1 text format."""
    out = atomic_write_lines(path, heightfield_lines(hf))
    logger.debug(f"Wrote {hf.rows}x{hf.cols} heightfield to {out}")
    return out


def parse_heightfield(text: str) -> Heightfield:
    """Parse HF v1 text. Values may be split across lines arbitrarily."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty heightfield file", 1)
    header = lines[0].split()
    if len(header) != 7 or header[0] != HF_MAGIC or header[1] != HF_VERSION:
        raise ParseError(f"expected '{HF_MAGIC} {HF_VERSION} rows cols resolution origin_x origin_y'", 1)
    try:
        rows, cols = int(header[2]), int(header[3])
        resolution, ox, oy = float(header[4]), float(header[5]), float(header[6])
    except ValueError as e:
        raise ParseError(f"bad header field: {e}", 1) from e
    if rows < 1 or cols < 1:
        raise ParseError("rows and cols must be >= 1", 1)

    count = rows * cols
    heights = np.zeros(count)
    void = np.zeros(count, dtype=bool)
    k = 0
    for line_no, line in enumerate(lines[1:], start=2):
        for token in line.split():
            if k >= count:
                raise ParseError(f"more than {count} values", line_no)
            if token == VOID_TOKEN:
                void[k] = True
            else:
                try:
                    heights[k] = float(token)
                except ValueError as e:
                    raise ParseError(f"bad height value {token!r}", line_no) from e
                if not np.isfinite(heights[k]):
                    raise ParseError(f"non-finite height {token!r}", line_no)
            k += 1
    if k != count:
        raise ParseError(f"expected {count} values, found {k}", len(lines))

    return Heightfield(
        origin=(ox, oy),
        resolution=resolution,
        heights=heights.reshape(rows, cols),
        void=void.reshape(rows, cols),
    )


def read_heightfield(path: Union[str, Path]) -> Heightfield:
    """Read a heightfield written by :func:`write_heightfield`."""
    with open(path, "r") as f:
        return parse_heightfield(f.read())
