"""Support polygons and CoP / CoM / capture-point stability margins."""

from locokernel.stability.margins import (
    StabilityKind,
    StabilityResult,
    capture_point,
    capture_point_margin,
    center_of_pressure,
    pendulum_height,
    stability_margin,
    stability_reward,
    stability_reward_cop,
    state_center_of_pressure,
    state_support_polygon,
    static_margin_com,
)
from locokernel.stability.polygon import SupportPolygon, point_polygon_margin, support_polygon

__all__ = [
    "StabilityKind",
    "StabilityResult",
    "SupportPolygon",
    "capture_point",
    "capture_point_margin",
    "center_of_pressure",
    "pendulum_height",
    "point_polygon_margin",
    "stability_margin",
    "stability_reward",
    "stability_reward_cop",
    "state_center_of_pressure",
    "state_support_polygon",
    "static_margin_com",
    "support_polygon",
]
