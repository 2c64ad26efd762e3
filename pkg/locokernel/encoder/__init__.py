"""Attention-based heightmap encoder (inference only)."""

from locokernel.encoder.model import (
    AttentionOutput,
    EncoderOutput,
    HeightmapEncoder,
    observation_vector,
)
from locokernel.encoder.params import load_params, save_params

__all__ = [
    "AttentionOutput",
    "EncoderOutput",
    "HeightmapEncoder",
    "load_params",
    "observation_vector",
    "save_params",
]
