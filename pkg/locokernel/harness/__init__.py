"""Rollouts, success criteria, aggregation and domain randomization."""

from locokernel.harness.env import KinematicEnv, StepResult
from locokernel.harness.evaluation import (
    AggregateTable,
    CriteriaMode,
    GroupMetrics,
    Outcome,
    RolloutResult,
    SuccessCriteria,
    aggregate,
    evaluate_success,
    group_results,
    summarize_log,
    write_results,
)
from locokernel.harness.log import StepRecord, TrajectoryLog, ingest_log, parse_log, write_log
from locokernel.harness.policies import StandPolicy, TrotPolicy, make_policy
from locokernel.harness.randomization import RandomizedParams, domain_randomize
from locokernel.harness.rollout import run_rollout
from locokernel.harness.runner import EvalPlan, episode_spawn, eval_tile_spec, ingest_directory, run_evaluation

__all__ = [
    "AggregateTable",
    "CriteriaMode",
    "EvalPlan",
    "GroupMetrics",
    "KinematicEnv",
    "Outcome",
    "RandomizedParams",
    "RolloutResult",
    "StandPolicy",
    "StepRecord",
    "StepResult",
    "SuccessCriteria",
    "TrajectoryLog",
    "TrotPolicy",
    "aggregate",
    "domain_randomize",
    "episode_spawn",
    "eval_tile_spec",
    "evaluate_success",
    "group_results",
    "ingest_directory",
    "ingest_log",
    "make_policy",
    "parse_log",
    "run_evaluation",
    "run_rollout",
    "summarize_log",
    "write_log",
    "write_results",
]
