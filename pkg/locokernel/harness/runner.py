"""Evaluation sweeps over terrain x level x velocity, and log-directory ingestion."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from locokernel.config import DEFAULT_CONFIG, KernelConfig
from locokernel.control.commands import CommandSample
from locokernel.errors import KernelError
from locokernel.harness.evaluation import CriteriaMode, RolloutResult, SuccessCriteria, summarize_log
from locokernel.harness.log import ingest_log, write_log
from locokernel.harness.policies import make_policy
from locokernel.harness.rollout import run_rollout
from locokernel.terrain.curriculum import tile_seed
from locokernel.terrain.generator import TerrainGenerator
from locokernel.terrain.heightfield import Heightfield
from locokernel.terrain.spec import TerrainSpec
from locokernel.util.metrics import Metrics

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[RolloutResult], None]

# SeedSequence stream for start poses, kept apart from domain randomization
_SPAWN_STREAM = 1


def eval_tile_spec(
    terrain: str,
    level: int,
    speed: float,
    duration: float,
    seed: int,
    config: KernelConfig = DEFAULT_CONFIG,
) -> TerrainSpec:
    """Tile long enough for the commanded run plus a margin on both ends."""
    h = config.harness
    length = 2.0 * (speed * duration + h.tile_margin)
    return TerrainSpec.from_name(
        terrain,
        level,
        extent=(length, h.tile_width),
        seed=seed,
        platform_margin=config.terrain.platform_margin,
    )


def episode_spawn(seed: int, config: KernelConfig = DEFAULT_CONFIG) -> Tuple[Tuple[float, float], float]:
    """Start pose of one evaluation episode: xy offset on the spawn platform and a heading offset.

    Drawn from ``seed`` alone, so a log's meta seed reproduces its start.
    """
    h = config.harness
    rng = np.random.default_rng([seed, _SPAWN_STREAM])
    dx, dy = rng.uniform(-h.spawn_jitter, h.spawn_jitter, size=2)
    yaw = rng.uniform(-h.yaw_jitter, h.yaw_jitter)
    return (float(dx), float(dy)), float(yaw)


@dataclass(frozen=True)
class EvalPlan:
    terrains: Sequence[str]
    levels: Sequence[int]
    speeds: Sequence[float]
    n: int
    policy: str = "scripted:trot"
    duration: float = DEFAULT_CONFIG.harness.duration
    mode: CriteriaMode = CriteriaMode.FIXED_DISTANCE
    seed: int = 0
    randomize: bool = False

    @property
    def total(self) -> int:
        return len(self.terrains) * len(self.levels) * len(self.speeds) * self.n

    def groups(self) -> Iterator[Tuple[int, str, int, float]]:
        for t_idx, terrain in enumerate(self.terrains):
            for level in self.levels:
                for speed in self.speeds:
                    yield t_idx, terrain, level, speed


def run_evaluation(
    plan: EvalPlan,
    config: KernelConfig = DEFAULT_CONFIG,
    log_dir: Optional[Path] = None,
    metrics: Optional[Metrics] = None,
    on_result: Optional[ProgressCallback] = None,
) -> List[RolloutResult]:
    """Run ``plan.n`` rollouts per group.

    Each group shares one generated tile; episodes differ by their start pose
    (see :func:`episode_spawn`) and, with ``plan.randomize``, by their
    randomized parameters.
    """
    generator = TerrainGenerator(config.terrain)
    results: List[RolloutResult] = []
    for t_idx, terrain, level, speed in plan.groups():
        spec = eval_tile_spec(terrain, level, speed, plan.duration, tile_seed(plan.seed, t_idx, level), config)
        start = metrics.timer_start("terrain") if metrics else 0.0
        hf: Heightfield = generator.generate(spec)
        if metrics:
            metrics.timer_end("terrain", start)

        command = CommandSample.forward(speed)
        criteria = SuccessCriteria(mode=plan.mode, duration=plan.duration, speed=speed)
        for episode in range(plan.n):
            policy = make_policy(plan.policy, config)
            seed = plan.seed + episode
            spawn_xy, spawn_yaw = episode_spawn(seed, config)
            log = run_rollout(
                spec,
                policy,
                command,
                plan.duration,
                seed=seed,
                config=config,
                hf=hf,
                randomize=plan.randomize,
                policy_name=plan.policy,
                metrics=metrics,
                spawn_xy=spawn_xy,
                spawn_yaw=spawn_yaw,
            )
            if log_dir is not None:
                write_log(log, Path(log_dir) / f"{spec.name}_L{level}_v{speed:.2f}_{episode:04d}.jsonl")
            result = summarize_log(log, criteria)
            results.append(result)
            if on_result:
                on_result(result)
        logger.info(
            f"{spec.name} level {level} @ {speed:.2f} m/s: "
            f"{sum(r.success for r in results[-plan.n:])}/{plan.n} successful"
        )
    return results


def ingest_directory(
    directory: Path,
    mode: CriteriaMode = CriteriaMode.FIXED_DISTANCE,
    pattern: str = "*.jsonl",
) -> Tuple[List[RolloutResult], Dict[str, str]]:
    """Summarise every log in ``directory``; malformed files are skipped and reported."""
    results: List[RolloutResult] = []
    skipped: Dict[str, str] = {}
    for path in sorted(Path(directory).glob(pattern)):
        try:
            log = ingest_log(path)
        except KernelError as e:
            logger.warning(f"Skipping {path.name}: {e}")
            skipped[path.name] = str(e)
            continue
        results.append(summarize_log(log, SuccessCriteria.for_log(log, mode)))
    logger.info(f"Ingested {len(results)} logs from {directory} ({len(skipped)} skipped)")
    return results, skipped
