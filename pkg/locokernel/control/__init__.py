"""Velocity commands, PD joint control and leg kinematics."""

from locokernel.control.commands import CommandSample, sample_global_command, to_global, to_local
from locokernel.control.kinematics import (
    DEFAULT_GEOMETRY,
    LEG_NAMES,
    LegGeometry,
    forward_kinematics,
    forward_kinematics_all,
)
from locokernel.control.pd import clamp_joint_limits, joint_limits, joint_targets, pd_torque

__all__ = [
    "CommandSample",
    "DEFAULT_GEOMETRY",
    "LEG_NAMES",
    "LegGeometry",
    "clamp_joint_limits",
    "forward_kinematics",
    "forward_kinematics_all",
    "joint_limits",
    "joint_targets",
    "pd_torque",
    "sample_global_command",
    "to_global",
    "to_local",
]
