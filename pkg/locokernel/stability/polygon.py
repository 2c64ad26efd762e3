"""Support polygon (convex hull of contact feet) and signed point margins."""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import numpy.typing as npt

from locokernel.errors import DegeneratePolygonError, NumericError, ShapeError
from locokernel.util.geom import cross2, polygon_area, segment_distances

FloatArray = npt.NDArray[np.float64]
Point = Tuple[float, float]

DUPLICATE_TOLERANCE = 1e-9
AREA_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SupportPolygon:
    """Counter-clockwise hull vertices in world xy, shape (n, 2).

    Fewer than three vertices means the contacts do not span an area
    (flight, two-leg phases or collinear feet).
    """

    vertices: FloatArray

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def edges(self) -> tuple[FloatArray, FloatArray]:
        """(starts, ends) of every edge l_0..l_{n-1}."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def contains(self, point: npt.ArrayLike) -> bool:
        """True when ``point`` lies on or inside the polygon."""
        if self.is_degenerate:
            return False
        p = tuple(np.asarray(point, dtype=float)[:2].tolist())
        ring = self.vertices.tolist()
        return all(cross2(a, b, p) >= 0 for a, b in zip(ring, ring[1:] + ring[:1]))


def _dedupe_sorted(pts: FloatArray) -> List[Point]:
    kept: List[Point] = []
    for x, y in pts.tolist():
        if not any(math.hypot(x - qx, y - qy) <= DUPLICATE_TOLERANCE for qx, qy in kept):
            kept.append((x, y))
    return kept


def support_polygon(contact_points: npt.ArrayLike) -> SupportPolygon:
    """Convex hull of planar contact points (monotone chain).

    Interior and collinear points are dropped. Fewer than three points, or
    collinear input, yields a degenerate polygon.
    """
    pts = np.asarray(contact_points, dtype=float)
    if pts.size == 0:
        return SupportPolygon(vertices=np.zeros((0, 2)))
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise ShapeError(f"contact points must be (k, 2), got {pts.shape}")
    pts = pts[:, :2]
    if not np.all(np.isfinite(pts)):
        raise NumericError("contact points must be finite")

    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    unique = _dedupe_sorted(pts)
    if len(unique) < 3:
        return SupportPolygon(vertices=np.array(unique, dtype=float).reshape(-1, 2))

    lower: List[Point] = []
    for p in unique:
        while len(lower) >= 2 and cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in unique[::-1]:
        while len(upper) >= 2 and cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3 or abs(polygon_area(hull)) <= AREA_TOLERANCE:
        # collinear: keep the two extremes
        return SupportPolygon(vertices=np.array([unique[0], unique[-1]]))
    return SupportPolygon(vertices=hull)


def point_polygon_margin(point: npt.ArrayLike, polygon: SupportPolygon) -> float:
    """Minimum distance from ``point`` to the polygon's edges.

    Positive inside, negative outside, zero on the boundary.
    """
    if polygon.is_degenerate:
        raise DegeneratePolygonError(
            f"support polygon has {len(polygon.vertices)} vertices, margin needs at least 3"
        )
    p = np.asarray(point, dtype=float)[:2]
    if not np.all(np.isfinite(p)):
        raise NumericError("margin point must be finite")
    starts, ends = polygon.edges()
    d = float(segment_distances(p, starts, ends).min())
    return d if polygon.contains(p) else -d
