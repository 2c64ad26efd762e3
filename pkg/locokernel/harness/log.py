"""Trajectory logs: one JSON header line, then one JSON record per step.

The header is ``{"schema": "locokernel.trajlog", "version": 1, "meta": {...}}``.
Meta holds the terrain spec, command, dt, seed, duration, spawn position and
the rollout status. Every following line is a :class:`StepRecord`.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

import numpy as np
import numpy.typing as npt

from locokernel.errors import LogParseError, LogValidationError
from locokernel.util.fs import atomic_write_lines

logger = logging.getLogger(__name__)

LOG_SCHEMA = "locokernel.trajlog"
LOG_VERSION = 1

STATUS_COMPLETED = "completed"
STATUS_FALL = "fall"
STATUS_OUT_OF_BOUNDS = "out_of_bounds"
STATUS_POLICY_ERROR = "policy_error"
LOG_STATUSES = (STATUS_COMPLETED, STATUS_FALL, STATUS_OUT_OF_BOUNDS, STATUS_POLICY_ERROR)

# expected shape of every array field in a step record
_ARRAY_SHAPES: Dict[str, tuple] = {
    "base_position": (3,),
    "v_local": (3,),
    "ang_vel": (3,),
    "command": (3,),
    "joint_pos": (12,),
    "joint_vel": (12,),
    "action": (12,),
    "torques": (12,),
    "foot_positions": (4, 3),
    "foot_forces": (4, 3),
    "foot_contact": (4,),
    "foot_over_void": (4,),
}


@dataclass
class StepRecord:
    """One control step. Arrays are stored as nested lists for exact JSON round trips."""

    t: float
    base_position: List[float]
    base_yaw: float
    v_local: List[float]
    ang_vel: List[float]
    command: List[float]
    joint_pos: List[float]
    joint_vel: List[float]
    action: List[float]
    torques: List[float]
    foot_positions: List[List[float]]
    foot_forces: List[List[float]]
    foot_contact: List[bool]
    foot_over_void: List[bool]
    base_contact: bool
    reward: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepRecord":
        names = {f.name for f in fields(cls)}
        missing = names - set(data) - {"reward"}
        if missing:
            raise KeyError(sorted(missing)[0])
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass
class TrajectoryLog:
    meta: Dict[str, Any]
    steps: List[StepRecord] = field(default_factory=list)
    # source line of every step when parsed from text; empty for in-memory logs
    line_numbers: List[int] = field(default_factory=list, compare=False, repr=False)

    def line_of(self, k: int) -> int:
        """Source line of step ``k``; without recorded lines the header is line 1 and steps follow."""
        if len(self.line_numbers) == len(self.steps):
            return self.line_numbers[k]
        return k + 2

    @property
    def dt(self) -> float:
        return float(self.meta["dt"])

    @property
    def status(self) -> str:
        return str(self.meta.get("status", STATUS_COMPLETED))

    @property
    def spawn_xy(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.meta.get("spawn_xy", (0.0, 0.0)), dtype=float)

    def array(self, name: str) -> npt.NDArray[Any]:
        """Stack one field over all steps."""
        return np.asarray([getattr(s, name) for s in self.steps])

    def lines(self) -> Iterator[str]:
        yield json.dumps({"schema": LOG_SCHEMA, "version": LOG_VERSION, "meta": self.meta})
        for step in self.steps:
            yield json.dumps(step.to_dict())


def write_log(log: TrajectoryLog, path: Union[str, Path]) -> Path:
    out = atomic_write_lines(path, log.lines())
    logger.debug(f"Wrote {len(log.steps)} steps to {out}")
    return out


def validate_log(log: TrajectoryLog) -> None:
    """Check log invariants; raises LogValidationError naming the field."""
    dt = log.meta.get("dt")
    if not isinstance(dt, (int, float)) or isinstance(dt, bool) or not math.isfinite(dt) or dt <= 0:
        raise LogValidationError(f"dt must be a positive number, got {dt!r}", "dt", 1)
    status = log.meta.get("status", STATUS_COMPLETED)
    if status not in LOG_STATUSES:
        raise LogValidationError(f"unknown status {status!r}", "status", 1)

    prev_t: Optional[float] = None
    for k, step in enumerate(log.steps):
        line_no = log.line_of(k)
        for name, shape in _ARRAY_SHAPES.items():
            arr = np.asarray(getattr(step, name))
            if arr.shape != shape:
                raise LogValidationError(f"expected shape {shape}, got {arr.shape}", name, line_no)
        if prev_t is not None and not math.isclose(step.t - prev_t, dt, rel_tol=1e-6, abs_tol=1e-9):
            raise LogValidationError(
                f"timestamps must increase by dt={dt}, got {prev_t} -> {step.t}", "t", line_no
            )
        prev_t = step.t


def parse_log(lines: List[str]) -> TrajectoryLog:
    """Parse and validate log lines; blank lines are ignored."""
    meta: Optional[Dict[str, Any]] = None
    steps: List[StepRecord] = []
    line_numbers: List[int] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise LogParseError(f"malformed record: {e.msg}", line_no) from e
        if not isinstance(record, dict):
            raise LogParseError("record is not a JSON object", line_no)
        if meta is None:
            if record.get("schema") != LOG_SCHEMA:
                raise LogParseError(f"expected {LOG_SCHEMA} header", line_no)
            if record.get("version") != LOG_VERSION:
                raise LogParseError(f"unsupported log version {record.get('version')!r}", line_no)
            if not isinstance(record.get("meta"), dict):
                raise LogParseError("header has no meta object", line_no)
            meta = record["meta"]
            continue
        try:
            steps.append(StepRecord.from_dict(record))
            line_numbers.append(line_no)
        except (KeyError, TypeError) as e:
            raise LogParseError(f"step record missing or bad field {e}", line_no) from e
    if meta is None:
        raise LogParseError("empty log", 1)
    log = TrajectoryLog(meta=meta, steps=steps, line_numbers=line_numbers)
    validate_log(log)
    return log


def ingest_log(path: Union[str, Path]) -> TrajectoryLog:
    """Read a trajectory log written by this harness or an external simulator."""
    with open(path, "r") as f:
        return parse_log(f.read().splitlines())
