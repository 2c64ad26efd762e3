"""Shared CLI helpers: option parsing, logging setup and error exits."""

import logging
import os
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, List, Optional

import typer
from rich.console import Console

from locokernel.config import MAX_LEVEL, KernelConfig, load_config
from locokernel.errors import KernelError
from locokernel.util.logging import LOG_FORMAT_ENV, setup_logging

console = Console()
logger = logging.getLogger("locokernel.cli")


def parse_floats(text: str, count: Optional[int] = None, name: str = "value") -> List[float]:
    """Comma or whitespace separated floats."""
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise typer.BadParameter(f"{name}: {e}") from e
    if count is not None and len(values) != count:
        raise typer.BadParameter(f"{name} needs {count} numbers, got {len(values)}")
    return values


def parse_levels(text: str) -> List[int]:
    """``"0..9"`` ranges and ``"0,5,9"`` lists."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            levels = list(range(int(lo), int(hi) + 1))
        else:
            levels = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise typer.BadParameter(f"levels: {e}") from e
    if not levels or any(not 0 <= lv <= MAX_LEVEL for lv in levels):
        raise typer.BadParameter(f"levels must lie in 0..{MAX_LEVEL}, got {text!r}")
    return levels


def parse_names(values: List[str]) -> List[str]:
    """Repeatable options that may also carry comma-separated lists."""
    return [n.strip() for v in values for n in v.split(",") if n.strip()]


def init_run(
    quiet: bool = False,
    json_logs: bool = False,
    log_dir: Optional[Path] = None,
) -> str:
    if json_logs:
        os.environ[LOG_FORMAT_ENV] = "json"
    run_id = datetime.now().strftime("%Y%m%d_%H%M%S")
    setup_logging(run_id, log_dir, "WARNING" if quiet else "INFO")
    return run_id


def get_config(profile: str, config_path: Optional[Path]) -> KernelConfig:
    with kernel_errors():
        return load_config(profile, config_path)


@contextmanager
def kernel_errors() -> Iterator[None]:
    """Turn kernel errors into a logged message and exit code 1."""
    try:
        yield
    except KernelError as e:
        logger.error(str(e))
        raise typer.Exit(1)
