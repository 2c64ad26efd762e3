"""Success/survival criteria and per-group aggregation of rollout results."""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from locokernel.config import DEFAULT_CONFIG
from locokernel.errors import InvalidArgumentError
from locokernel.harness.log import STATUS_COMPLETED, TrajectoryLog
from locokernel.reward.metrics import mean_power, mean_tracking_error
from locokernel.util.fs import atomic_write_lines

logger = logging.getLogger(__name__)

GroupKey = Tuple[str, int, float]

RESULT_COLUMNS = (
    "terrain",
    "level",
    "velocity",
    "n",
    "success_pct",
    "survival_pct",
    "tracking_error",
    "power",
)


class CriteriaMode(str, Enum):
    FIXED_DISTANCE = "fixed"
    HALF_EXPECTED = "half_expected"


@dataclass(frozen=True)
class SuccessCriteria:
    mode: CriteriaMode = CriteriaMode.FIXED_DISTANCE
    duration: float = DEFAULT_CONFIG.harness.duration
    min_distance: float = DEFAULT_CONFIG.harness.min_distance
    speed: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", CriteriaMode(self.mode))
        if not self.duration > 0:
            raise InvalidArgumentError(f"duration must be > 0, got {self.duration}")

    @property
    def threshold(self) -> float:
        if self.mode is CriteriaMode.FIXED_DISTANCE:
            return self.min_distance
        return 0.5 * self.speed * self.duration

    @classmethod
    def for_log(cls, log: TrajectoryLog, mode: Union[CriteriaMode, str]) -> "SuccessCriteria":
        """Criteria using the log's own command speed and duration."""
        v = log.meta.get("command", {}).get("v_global", (0.0, 0.0))
        duration = float(log.meta.get("duration") or len(log.steps) * log.dt or 1.0)
        return cls(mode=CriteriaMode(mode), duration=duration, speed=float(math.hypot(v[0], v[1])))


@dataclass(frozen=True)
class Outcome:
    success: bool
    survival: bool
    displacement: float


def displacement(log: TrajectoryLog) -> float:
    """Final planar distance of the base from its spawn point."""
    if not log.steps:
        return 0.0
    final = np.asarray(log.steps[-1].base_position[:2], dtype=float)
    return float(np.linalg.norm(final - log.spawn_xy))


def evaluate_success(log: TrajectoryLog, criteria: SuccessCriteria) -> Outcome:
    """Survival: completed without base contact. Success: survival and distance above threshold."""
    survival = log.status == STATUS_COMPLETED and not any(s.base_contact for s in log.steps)
    dist = displacement(log)
    return Outcome(success=survival and dist > criteria.threshold, survival=survival, displacement=dist)


@dataclass(frozen=True)
class RolloutResult:
    terrain: str
    level: int
    velocity: float
    success: bool
    survival: bool
    tracking_error: float
    power: float

    @property
    def key(self) -> GroupKey:
        return (self.terrain, self.level, self.velocity)


def summarize_log(log: TrajectoryLog, criteria: Optional[SuccessCriteria] = None) -> RolloutResult:
    criteria = criteria or SuccessCriteria.for_log(log, CriteriaMode.FIXED_DISTANCE)
    outcome = evaluate_success(log, criteria)
    if log.steps:
        tracking = mean_tracking_error(log.array("command"), log.array("v_local"))
        power = mean_power(log.array("torques"), log.array("joint_vel"))
    else:
        tracking, power = math.nan, math.nan
    terrain = log.meta.get("terrain", {})
    v = log.meta.get("command", {}).get("v_global", (0.0, 0.0))
    return RolloutResult(
        terrain=str(terrain.get("name", terrain.get("kind", "unknown"))),
        level=int(terrain.get("level", -1)),
        velocity=round(float(math.hypot(v[0], v[1])), 6),
        success=outcome.success,
        survival=outcome.survival,
        tracking_error=tracking,
        power=power,
    )


@dataclass(frozen=True)
class GroupMetrics:
    terrain: str
    level: int
    velocity: float
    n: int
    success_rate: float
    survival_rate: float
    tracking_error: float
    power: float


@dataclass(frozen=True)
class AggregateTable:
    groups: List[GroupMetrics]
    overall: Dict[str, float]
    skipped: List[GroupKey]

    def rows(self) -> Iterator[Tuple[str, ...]]:
        for g in self.groups:
            yield (
                g.terrain,
                str(g.level),
                f"{g.velocity:.2f}",
                str(g.n),
                f"{g.success_rate:.1f}",
                f"{g.survival_rate:.1f}",
                f"{g.tracking_error:.4f}",
                f"{g.power:.2f}",
            )
        if self.groups:
            o = self.overall
            yield (
                "overall",
                "-",
                "-",
                str(int(o["n"])),
                f"{o['success_rate']:.1f}",
                f"{o['survival_rate']:.1f}",
                f"{o['tracking_error']:.4f}",
                f"{o['power']:.2f}",
            )


def group_results(results: Iterable[RolloutResult]) -> Dict[GroupKey, List[RolloutResult]]:
    grouped: Dict[GroupKey, List[RolloutResult]] = defaultdict(list)
    for r in results:
        grouped[r.key].append(r)
    return dict(grouped)


def _mean_defined(values: Sequence[float]) -> float:
    """Mean over the non-NaN entries; NaN when none is defined."""
    defined = [v for v in values if not math.isnan(v)]
    return float(np.mean(defined)) if defined else math.nan


def aggregate(groups: Mapping[GroupKey, Sequence[RolloutResult]]) -> AggregateTable:
    """Per-group means; the overall row is the mean over group means.

    Empty groups are skipped with a warning. Rates are percentages.
    Tracking error and power skip zero-step rollouts, which have neither.
    """
    rows: List[GroupMetrics] = []
    skipped: List[GroupKey] = []
    for key in sorted(groups):
        results = groups[key]
        if not results:
            logger.warning(f"Skipping empty result group {key}")
            skipped.append(key)
            continue
        rows.append(
            GroupMetrics(
                terrain=key[0],
                level=key[1],
                velocity=key[2],
                n=len(results),
                success_rate=100.0 * float(np.mean([r.success for r in results])),
                survival_rate=100.0 * float(np.mean([r.survival for r in results])),
                tracking_error=_mean_defined([r.tracking_error for r in results]),
                power=_mean_defined([r.power for r in results]),
            )
        )

    overall: Dict[str, float] = {}
    if rows:
        overall = {
            "n": float(sum(g.n for g in rows)),
            "success_rate": float(np.mean([g.success_rate for g in rows])),
            "survival_rate": float(np.mean([g.survival_rate for g in rows])),
            "tracking_error": _mean_defined([g.tracking_error for g in rows]),
            "power": _mean_defined([g.power for g in rows]),
        }
    return AggregateTable(groups=rows, overall=overall, skipped=skipped)


def results_tsv_lines(table: AggregateTable) -> Iterator[str]:
    yield "\t".join(RESULT_COLUMNS)
    for row in table.rows():
        yield "\t".join(row)


def write_results(table: AggregateTable, path: Union[str, Path]) -> Path:
    out = atomic_write_lines(path, results_tsv_lines(table))
    logger.info(f"Wrote {len(table.groups)} result rows to {out}")
    return out
