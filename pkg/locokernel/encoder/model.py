"""Heightmap encoder: CNN features, token concatenation and proprio-query attention."""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt
import torch
import torch.nn as nn
import torch.nn.functional as F

from locokernel.config import DEFAULT_CONFIG, EncoderConfig
from locokernel.errors import NumericError, ShapeError
from locokernel.observation.frame import ObservationFrame
from locokernel.observation.heightmap import GRID_SHAPE, NUM_CELLS
from locokernel.observation.proprio import PROPRIO_DIM

logger = logging.getLogger(__name__)

ArrayOrTensor = Union[npt.ArrayLike, torch.Tensor]

COORD_DIM = 3
FOOT_CHANNELS = 4


def _as_tensor(x: ArrayOrTensor) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(torch.float64)
    return torch.from_numpy(np.array(x, dtype=np.float64))


@dataclass(frozen=True)
class AttentionOutput:
    """z (d,), per-head weights (n_heads, tokens) and per-head outputs before out_proj."""

    z: torch.Tensor
    weights: torch.Tensor
    head_outputs: torch.Tensor


@dataclass(frozen=True)
class EncoderOutput:
    z: npt.NDArray[np.float64]
    tokens: npt.NDArray[np.float64]
    attention: npt.NDArray[np.float64]


class HeightmapEncoder(nn.Module):
    """Two-layer same-padding CNN, 48->d proprio projection and d-wide attention.

    Tokens are (x, y, z, cnn features, footmap) per heightmap cell; the
    embedded proprioception is the single attention query.
    """

    def __init__(self, config: EncoderConfig = DEFAULT_CONFIG.encoder):
        super().__init__()
        self.config = config
        self.d_model = config.d_model
        self.n_heads = config.n_heads
        self.d_head = config.d_model // config.n_heads
        self.feature_dim = config.d_model - COORD_DIM - FOOT_CHANNELS
        pad = config.kernel_size // 2

        self.conv1 = nn.Conv2d(1, config.cnn_channels, config.kernel_size, padding=pad)
        self.conv2 = nn.Conv2d(config.cnn_channels, self.feature_dim, config.kernel_size, padding=pad)
        self.proprio_proj = nn.Linear(config.proprio_dim, config.d_model)
        self.q_proj = nn.Linear(config.d_model, config.d_model)
        self.k_proj = nn.Linear(config.d_model, config.d_model)
        self.v_proj = nn.Linear(config.d_model, config.d_model)
        self.out_proj = nn.Linear(config.d_model, config.d_model)
        self.double()
        self.requires_grad_(False)
        self.eval()

    def layers(self) -> tuple[nn.Module, ...]:
        return (
            self.conv1,
            self.conv2,
            self.proprio_proj,
            self.q_proj,
            self.k_proj,
            self.v_proj,
            self.out_proj,
        )

    @classmethod
    def from_seed(cls, seed: int = 0, config: EncoderConfig = DEFAULT_CONFIG.encoder) -> "HeightmapEncoder":
        """Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation."""
        model = cls(config)
        gen = torch.Generator().manual_seed(int(seed))
        with torch.no_grad():
            for module in model.layers():
                fan_in = module.weight[0].numel()
                bound = 1.0 / math.sqrt(fan_in)
                module.weight.uniform_(-bound, bound, generator=gen)
                module.bias.uniform_(-bound, bound, generator=gen)
        logger.debug(f"Initialised encoder from seed {seed}")
        return model

    # ---------------------------------------------------------------- stages

    def cnn_features(self, heightmap: ArrayOrTensor) -> torch.Tensor:
        """(17, 11) heightmap -> (17, 11, d - 7) features."""
        h = _as_tensor(heightmap)
        if tuple(h.shape) != GRID_SHAPE:
            raise ShapeError(f"heightmap must be {GRID_SHAPE}, got {tuple(h.shape)}")
        x = F.relu(self.conv1(h[None, None]))
        x = self.conv2(x)
        return x[0].permute(1, 2, 0)

    def concat_tokens(self, coords: ArrayOrTensor, features: ArrayOrTensor, footmap: ArrayOrTensor) -> torch.Tensor:
        """Per-cell (coords, features, footmap) concatenation, (17, 11, d)."""
        c, f, m = _as_tensor(coords), _as_tensor(features), _as_tensor(footmap)
        expected = ((*GRID_SHAPE, COORD_DIM), (*GRID_SHAPE, self.feature_dim), (*GRID_SHAPE, FOOT_CHANNELS))
        for name, t, shape in zip(("coords", "features", "footmap"), (c, f, m), expected):
            if tuple(t.shape) != shape:
                raise ShapeError(f"{name} must be {shape}, got {tuple(t.shape)}")
        return torch.cat([c, f, m], dim=-1)

    def proprio_embed(self, o_prop: ArrayOrTensor) -> torch.Tensor:
        p = _as_tensor(o_prop)
        if tuple(p.shape) != (self.config.proprio_dim,):
            raise ShapeError(f"proprio must have {self.config.proprio_dim} entries, got {tuple(p.shape)}")
        return self.proprio_proj(p)

    def mha_encode(self, tokens: ArrayOrTensor, query: ArrayOrTensor) -> AttentionOutput:
        """Single-query multi-head attention over the flattened token grid."""
        kv = _as_tensor(tokens).reshape(-1, self.d_model)
        q_in = _as_tensor(query)
        if kv.shape[0] != NUM_CELLS:
            raise ShapeError(f"expected {NUM_CELLS} tokens, got {kv.shape[0]}")
        if tuple(q_in.shape) != (self.d_model,):
            raise ShapeError(f"query must have {self.d_model} entries, got {tuple(q_in.shape)}")
        if not (torch.isfinite(kv).all() and torch.isfinite(q_in).all()):
            raise NumericError("attention inputs must be finite")

        q = self.q_proj(q_in).reshape(self.n_heads, self.d_head)
        k = self.k_proj(kv).reshape(-1, self.n_heads, self.d_head).transpose(0, 1)
        v = self.v_proj(kv).reshape(-1, self.n_heads, self.d_head).transpose(0, 1)

        logits = torch.einsum("hd,htd->ht", q, k) / math.sqrt(self.d_head)
        weights = torch.softmax(logits, dim=-1)
        heads = torch.einsum("ht,htd->hd", weights, v)
        z = self.out_proj(heads.reshape(self.d_model))
        if not torch.isfinite(z).all():
            raise NumericError("attention produced non-finite output")
        return AttentionOutput(z=z, weights=weights, head_outputs=heads)

    def forward(self, heightmap: ArrayOrTensor, coords: ArrayOrTensor, footmap: ArrayOrTensor, o_prop: ArrayOrTensor) -> torch.Tensor:
        tokens = self.concat_tokens(coords, self.cnn_features(heightmap), footmap)
        return self.mha_encode(tokens, self.proprio_embed(o_prop)).z

    # -------------------------------------------------------------- pipeline

    @torch.no_grad()
    def encode(self, frame: ObservationFrame) -> EncoderOutput:
        """z_t for one observation frame, with tokens and attention maps."""
        tokens = self.concat_tokens(
            frame.coords_3d, self.cnn_features(frame.heightmap.values), frame.footmap.values
        )
        out = self.mha_encode(tokens, self.proprio_embed(frame.proprio))
        return EncoderOutput(
            z=out.z.numpy().copy(),
            tokens=tokens.numpy().copy(),
            attention=out.weights.reshape(self.n_heads, *GRID_SHAPE).numpy().copy(),
        )


def observation_vector(frame: ObservationFrame, encoder: HeightmapEncoder) -> npt.NDArray[np.float64]:
    """Full policy input [o_prop, z_t], length 48 + d."""
    z = encoder.encode(frame).z
    out = np.concatenate([frame.proprio, z])
    assert out.shape == (PROPRIO_DIM + encoder.d_model,)
    return out
