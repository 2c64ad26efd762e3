"""Planar geometry helpers shared by observation, control and stability code."""

from typing import Sequence

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]


def yaw_matrix(yaw: float) -> FloatArray:
    """2x2 rotation taking base-frame xy into the world frame."""
    c, s = np.cos(yaw), np.sin(yaw)
    return np.array([[c, -s], [s, c]])


def base_to_world_xy(points: npt.ArrayLike, base_xy: npt.ArrayLike, yaw: float) -> FloatArray:
    """Rotate base-frame points (..., 2) by yaw and translate by the base position."""
    pts = np.asarray(points, dtype=float)
    return pts @ yaw_matrix(yaw).T + np.asarray(base_xy, dtype=float)[:2]


def world_to_base_xy(points: npt.ArrayLike, base_xy: npt.ArrayLike, yaw: float) -> FloatArray:
    """Inverse of :func:`base_to_world_xy`."""
    pts = np.asarray(points, dtype=float) - np.asarray(base_xy, dtype=float)[:2]
    return pts @ yaw_matrix(yaw)


def cross2(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """z-component of (a - o) x (b - o); positive when o->a->b turns left."""
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def segment_distances(point: npt.ArrayLike, starts: FloatArray, ends: FloatArray) -> FloatArray:
    """Distance from ``point`` to each segment starts[i] -> ends[i]."""
    p = np.asarray(point, dtype=float)
    ab = ends - starts
    ap = p - starts
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.divide(
        np.einsum("ij,ij->i", ap, ab),
        denom,
        out=np.zeros_like(denom),
        where=denom > 1e-20,
    )
    t = np.clip(t, 0.0, 1.0)
    proj = starts + t[:, None] * ab
    return np.linalg.norm(p - proj, axis=1)


def polygon_area(vertices: FloatArray) -> float:
    """Signed shoelace area; positive for counter-clockwise vertex order."""
    if len(vertices) < 3:
        return 0.0
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
