"""Support polygon, margin and stability reward tests."""

import math
from itertools import combinations

import numpy as np
import pytest
from scipy.spatial import Delaunay

from locokernel.errors import DegeneratePolygonError, DomainError, InvalidArgumentError, NumericError
from locokernel.observation import RobotState
from locokernel.stability import (
    StabilityKind,
    capture_point,
    capture_point_margin,
    center_of_pressure,
    pendulum_height,
    point_polygon_margin,
    stability_margin,
    stability_reward,
    stability_reward_cop,
    static_margin_com,
    support_polygon,
)

UNIT_SQUARE = support_polygon([[0, 0], [1, 0], [1, 1], [0, 1]])

# FR, FL, RR, RL on a 0.4 m x 0.3 m rectangle
RECT_FEET = np.array([[0.2, -0.15, 0.0], [0.2, 0.15, 0.0], [-0.2, -0.15, 0.0], [-0.2, 0.15, 0.0]])


def _stance(contact=(True, True, True, True), forces=None, base=(0.0, 0.0, 0.35), vel=(0.0, 0.0, 0.0), yaw=0.0):
    f = np.zeros((4, 3))
    f[:, 2] = 10.0 if forces is None else forces
    return RobotState(
        base_position=base,
        base_yaw=yaw,
        base_lin_vel=vel,
        foot_positions=RECT_FEET,
        foot_forces=f,
        foot_contact=contact,
    )


def _in_triangle(p, a, b, c):
    d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
    d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def _extreme_points(points):
    """Points not inside any triangle of the other points."""
    extreme = []
    for i, p in enumerate(points):
        others = np.delete(points, i, axis=0)
        if not any(_in_triangle(p, *tri) for tri in combinations(others, 3)):
            extreme.append(tuple(p))
    return set(extreme)


def _edge_distance(p, a, b, samples=2001):
    """Dense sampling of the segment, refined by ternary search around the best sample."""
    t = np.linspace(0.0, 1.0, samples)
    pts = a + t[:, None] * (b - a)
    k = int(np.argmin(np.linalg.norm(pts - p, axis=1)))
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, samples - 1)]
    for _ in range(100):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if np.linalg.norm(a + m1 * (b - a) - p) < np.linalg.norm(a + m2 * (b - a) - p):
            hi = m2
        else:
            lo = m1
    return float(np.linalg.norm(a + 0.5 * (lo + hi) * (b - a) - p))


class TestSupportPolygon:
    """Convex hull of contact points"""

    def test_rectangle(self):
        poly = support_polygon(RECT_FEET[:, :2])
        assert len(poly.vertices) == 4
        assert poly.area == pytest.approx(0.12)

    def test_interior_point_dropped(self):
        poly = support_polygon([[0, 0], [2, 0], [0, 2], [0.5, 0.5]])
        assert len(poly.vertices) == 3
        assert (0.5, 0.5) not in {tuple(v) for v in poly.vertices}

    def test_degenerate_inputs(self):
        assert support_polygon([[0, 0], [1, 0]]).is_degenerate
        assert support_polygon([[0, 0], [1, 1], [2, 2]]).is_degenerate
        assert support_polygon([[0, 0], [0, 0], [0, 0]]).is_degenerate
        assert support_polygon(np.zeros((0, 2))).is_degenerate

    def test_matches_brute_force(self, rng):
        for _ in range(200):
            n = int(rng.integers(3, 9))
            points = rng.uniform(-1.0, 1.0, size=(n, 2))
            poly = support_polygon(points)
            assert poly.area > 0
            assert {tuple(v) for v in poly.vertices} == _extreme_points(points)
            for p in points:
                assert point_polygon_margin(p, poly) >= -1e-9

    def test_rejects_non_finite(self):
        with pytest.raises(NumericError):
            support_polygon([[0, 0], [1, np.nan], [0, 1]])


class TestMargin:
    """Signed point-to-polygon margin"""

    def test_unit_square_examples(self):
        assert point_polygon_margin([0.5, 0.5], UNIT_SQUARE) == pytest.approx(0.5, abs=1e-12)
        assert point_polygon_margin([0.25, 0.5], UNIT_SQUARE) == pytest.approx(0.25, abs=1e-12)
        assert point_polygon_margin([1.5, 0.5], UNIT_SQUARE) == pytest.approx(-0.5, abs=1e-12)
        assert point_polygon_margin([1.0, 0.5], UNIT_SQUARE) == 0.0

    def test_degenerate_polygon_raises(self):
        with pytest.raises(DegeneratePolygonError):
            point_polygon_margin([0, 0], support_polygon([[0, 0], [1, 0]]))

    def test_matches_sampled_edges(self, rng):
        checked = 0
        while checked < 500:
            poly = support_polygon(rng.uniform(0.0, 1.0, size=(int(rng.integers(3, 9)), 2)))
            if poly.is_degenerate:
                continue
            p = rng.uniform(-0.5, 1.5, size=2)
            starts, ends = poly.edges()
            expected = min(_edge_distance(p, a, b) for a, b in zip(starts, ends))
            margin = point_polygon_margin(p, poly)
            assert abs(margin) == pytest.approx(expected, abs=1e-6)
            if abs(margin) > 1e-9:
                inside = Delaunay(poly.vertices).find_simplex(p) >= 0
                assert (margin > 0) == inside
            checked += 1

    def test_invariant_under_rigid_motion(self, rng):
        for _ in range(100):
            points = rng.uniform(-1.0, 1.0, size=(6, 2))
            p = rng.uniform(-1.5, 1.5, size=2)
            theta = rng.uniform(-math.pi, math.pi)
            shift = rng.uniform(-5.0, 5.0, size=2)
            rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
            moved = support_polygon(points @ rot.T + shift)
            base = point_polygon_margin(p, support_polygon(points))
            assert point_polygon_margin(rot @ p + shift, moved) == pytest.approx(base, abs=1e-9)


class TestCenterOfPressure:
    """Force-weighted contact centre"""

    def test_equal_loads(self):
        cop = center_of_pressure(RECT_FEET, [[0, 0, 10.0]] * 4)
        assert cop.tolist() == pytest.approx([0.0, 0.0], abs=1e-15)

    def test_weighted(self):
        cop = center_of_pressure([[0, 0, 0], [1, 0, 0]], [[0, 0, 3.0], [0, 0, 1.0]])
        assert cop.tolist() == pytest.approx([0.25, 0.0])

    def test_no_load(self):
        assert center_of_pressure(RECT_FEET, np.zeros((4, 3))) is None
        assert center_of_pressure(RECT_FEET, [[0, 0, -1.0]] * 4) is None

    def test_cop_stays_inside_hull(self, rng):
        for _ in range(200):
            positions = np.column_stack([rng.uniform(-1, 1, size=(4, 2)), np.zeros(4)])
            forces = np.column_stack([np.zeros((4, 2)), rng.uniform(0.1, 50.0, size=4)])
            poly = support_polygon(positions[:, :2])
            if poly.is_degenerate:
                continue
            assert point_polygon_margin(center_of_pressure(positions, forces), poly) >= -1e-12


class TestStabilityRewards:
    """CoP, CoM and capture-point rewards"""

    def test_cop_centred(self):
        assert stability_reward_cop(_stance()) == pytest.approx(0.15, abs=1e-12)

    def test_cop_outside_penalised(self):
        # RL is loaded but out of contact, pulling the CoP off the FR/FL/RR triangle
        state = _stance(contact=(True, True, True, False), forces=[1.0, 1.0, 1.0, 100.0])
        assert stability_reward_cop(state) == -1.0

    def test_flight_phase_is_zero(self):
        assert stability_reward_cop(_stance(contact=(False,) * 4)) == 0.0
        assert stability_reward_cop(_stance(contact=(True, True, False, False))) == 0.0
        assert stability_margin(_stance(contact=(False,) * 4)) is None

    def test_no_load_is_zero(self):
        assert stability_reward_cop(_stance(forces=0.0)) == 0.0

    def test_com_margin(self):
        assert static_margin_com(_stance()) == pytest.approx(0.15, abs=1e-12)
        assert static_margin_com(_stance(base=(0.2, 0.0, 0.35))) == 0.0
        assert static_margin_com(_stance(base=(0.5, 0.0, 0.35))) == -1.0

    def test_capture_point_offset(self):
        state = _stance(vel=(1.0, 0.0, 0.0))
        cp = capture_point(state)
        assert cp[0] == pytest.approx(0.18888, abs=1e-5)
        assert cp[1] == pytest.approx(0.0, abs=1e-15)
        fast = capture_point(_stance(vel=(2.0, 0.0, 0.0)))
        assert fast[0] == pytest.approx(2 * cp[0], rel=1e-12)

    def test_capture_point_uses_yaw(self):
        cp = capture_point(_stance(vel=(1.0, 0.0, 0.0), yaw=math.pi / 2))
        assert cp[0] == pytest.approx(0.0, abs=1e-12)
        assert cp[1] == pytest.approx(0.18888, abs=1e-5)

    def test_capture_point_margin(self):
        assert capture_point_margin(_stance()) == pytest.approx(0.15, abs=1e-12)
        assert capture_point_margin(_stance(vel=(2.0, 0.0, 0.0))) == -1.0

    def test_capture_point_needs_height(self):
        with pytest.raises(DomainError):
            capture_point(_stance(base=(0.0, 0.0, 0.0)))
        with pytest.raises(DomainError):
            capture_point(_stance(), gravity=0.0)

    def test_capture_point_below_contacts_is_undefined(self):
        sunk = _stance(base=(0.0, 0.0, 0.0), vel=(1.0, 0.0, 0.0))
        assert pendulum_height(sunk) == 0.0
        assert stability_margin(sunk, StabilityKind.CAPTURE_POINT) is None
        assert capture_point_margin(sunk) == 0.0
        assert stability_reward(_stance(base=(0.0, 0.0, -0.1)), StabilityKind.CAPTURE_POINT) == 0.0

    def test_pendulum_height(self):
        assert pendulum_height(_stance()) == pytest.approx(0.35)
        assert pendulum_height(_stance(), ground_height=0.1) == pytest.approx(0.25)
        assert pendulum_height(_stance(contact=(False,) * 4, base=(0.0, 0.0, 0.3))) == pytest.approx(0.3)

    def test_kind_parsing(self):
        assert StabilityKind.parse("cp") is StabilityKind.CAPTURE_POINT
        assert StabilityKind.parse("com") is StabilityKind.COM
        with pytest.raises(InvalidArgumentError):
            StabilityKind.parse("zmp")

    def test_margin_result(self):
        result = stability_margin(_stance(), StabilityKind.COM)
        assert result.kind is StabilityKind.COM
        assert result.point == (0.0, 0.0)
        assert result.margin == pytest.approx(0.15, abs=1e-12)

    def test_reward_bounded_and_finite(self, rng):
        for _ in range(500):
            feet = np.column_stack([rng.uniform(-0.3, 0.3, size=(4, 2)), np.zeros(4)])
            forces = np.column_stack([np.zeros((4, 2)), rng.uniform(0.0, 40.0, size=4)])
            state = RobotState(
                base_position=[*rng.uniform(-0.1, 0.1, size=2), 0.3],
                base_lin_vel=[*rng.uniform(-1.0, 1.0, size=2), 0.0],
                foot_positions=feet,
                foot_forces=forces,
                foot_contact=rng.random(4) < 0.7,
            )
            for kind in StabilityKind:
                r = stability_reward(state, kind)
                assert np.isfinite(r)
                assert r == -1.0 or 0.0 <= r <= 0.6
