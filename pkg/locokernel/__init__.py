"""Locokernel - deterministic quadruped locomotion environment kernel and evaluation harness."""

__version__ = "1.0.0"
