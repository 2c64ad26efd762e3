"""Typer command-line interface."""

import typer

from locokernel.cli import evaluation
from locokernel.cli import kernel

app = typer.Typer(help="Quadruped locomotion kernel: terrain, observations, rewards and evaluation.")
kernel.register(app)
evaluation.register(app)

__all__ = ["app"]
