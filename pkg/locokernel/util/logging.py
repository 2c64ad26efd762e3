"""Logging setup with Rich console output or JSON lines."""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

try:
    from rich import traceback
    from rich.console import Console
    from rich.logging import RichHandler

    HAS_RICH = True
except ImportError:
    HAS_RICH = False

LOG_FORMAT_ENV = "LOCO_LOG_FORMAT"
PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class JsonFormatter(logging.Formatter):
    """JSON log formatter."""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            "timestamp": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        run_id = getattr(record, "run_id", None)
        if run_id:
            log_entry["run_id"] = run_id
        return json.dumps(log_entry)


class RunIdFilter(logging.Filter):
    """Tag kernel records with the current run id."""

    def __init__(self, run_id: str):
        super().__init__()
        self.run_id = run_id

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = self.run_id
        return True


def setup_logging(
    run_id: Optional[str] = None,
    log_dir: Optional[Path] = None,
    level: str = "INFO",
) -> logging.Logger:
    """Set up console logging (rich, json or plain) with optional file output."""
    log_format = os.environ.get(LOG_FORMAT_ENV, "").lower()

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler: logging.Handler
    if log_format == "json":
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(JsonFormatter())
    elif HAS_RICH and log_format != "plain":
        traceback.install()
        console_handler = RichHandler(
            console=Console(stderr=True),
            show_time=True,
            show_path=False,
            markup=False,
        )
    else:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
    root_logger.addHandler(console_handler)

    if log_dir:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / "locokernel.log")
        file_handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
        root_logger.addHandler(file_handler)

    kernel_logger = logging.getLogger("locokernel")
    for existing in kernel_logger.filters[:]:
        if isinstance(existing, RunIdFilter):
            kernel_logger.removeFilter(existing)
    if run_id:
        kernel_logger.addFilter(RunIdFilter(run_id))

    return kernel_logger
