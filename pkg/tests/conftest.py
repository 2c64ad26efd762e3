"""Pytest configuration for locokernel tests."""

import logging
import os

import numpy as np
import pytest

from locokernel.config import DEFAULT_CONFIG, KernelConfig
from locokernel.observation import RobotState
from locokernel.terrain import Heightfield

os.environ.setdefault("LOCO_LOG_FORMAT", "pretty")


@pytest.fixture
def config() -> KernelConfig:
    """Built-in default configuration."""
    return DEFAULT_CONFIG


@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic generator so failures reproduce."""
    return np.random.default_rng(42)


@pytest.fixture
def flat_field() -> Heightfield:
    """6 m x 4 m flat tile at height 0, centred on the origin."""
    rows, cols = 121, 81
    return Heightfield(
        origin=(-3.0, -2.0),
        resolution=0.05,
        heights=np.zeros((rows, cols)),
        void=np.zeros((rows, cols), dtype=bool),
    )


@pytest.fixture
def standing_state() -> RobotState:
    """Robot standing at the origin on flat ground in the default pose."""
    return RobotState.standing(0.0, 0.0)


@pytest.fixture(autouse=True)
def _restore_root_logging():
    """CLI commands reconfigure the root logger; put it back after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers[:]:
        if handler not in handlers:
            root.removeHandler(handler)
            handler.close()
    for handler in handlers:
        if handler not in root.handlers:
            root.addHandler(handler)
    root.setLevel(level)
