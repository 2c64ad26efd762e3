"""Reward terms, weighted totals and trajectory metrics."""

from locokernel.reward.metrics import mean_power, mean_tracking_error, power, tracking_error
from locokernel.reward.terms import (
    REWARD_TERMS,
    RewardBreakdown,
    RewardComputer,
    StepContext,
    breakdown_means,
    compute_rewards,
    phi,
    stumble_count,
)

__all__ = [
    "REWARD_TERMS",
    "RewardBreakdown",
    "RewardComputer",
    "StepContext",
    "breakdown_means",
    "compute_rewards",
    "mean_power",
    "mean_tracking_error",
    "phi",
    "power",
    "stumble_count",
    "tracking_error",
]
