"""Binary encoder parameter files.

Layout, little-endian throughout::

    magic  b"LKEP"        4 bytes
    version               uint32 (1)
    n_heads               uint32
    n_arrays              uint32
    per array:
        name_len          uint16, then UTF-8 name
        ndim              uint8, then ndim x uint32 dims
        data              prod(dims) x float32, row-major

Array names are the encoder's ``state_dict`` keys.
"""

import logging
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np
import torch

from locokernel.config import DEFAULT_CONFIG, EncoderConfig
from locokernel.encoder.model import HeightmapEncoder
from locokernel.errors import ParamFileError
from locokernel.util.fs import atomic_write_bytes

logger = logging.getLogger(__name__)

PARAM_MAGIC = b"LKEP"
PARAM_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def encode_params(encoder: HeightmapEncoder) -> bytes:
    state = encoder.state_dict()
    chunks = [_HEADER.pack(PARAM_MAGIC, PARAM_VERSION, encoder.n_heads, len(state))]
    for name, tensor in state.items():
        raw = name.encode("utf-8")
        arr = tensor.detach().cpu().numpy().astype("<f4")
        chunks.append(struct.pack("<H", len(raw)) + raw)
        chunks.append(struct.pack(f"<B{arr.ndim}I", arr.ndim, *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    return b"".join(chunks)


def save_params(encoder: HeightmapEncoder, path: Union[str, Path]) -> Path:
    out = atomic_write_bytes(path, encode_params(encoder))
    logger.info(f"Saved encoder parameters to {out}")
    return out


def decode_params(payload: bytes) -> tuple[int, Dict[str, np.ndarray]]:
    """(n_heads, named float32 arrays) from a parameter file's bytes."""
    try:
        magic, version, n_heads, count = _HEADER.unpack_from(payload, 0)
    except struct.error as e:
        raise ParamFileError("parameter file too short for header") from e
    if magic != PARAM_MAGIC:
        raise ParamFileError(f"bad magic {magic!r}")
    if version != PARAM_VERSION:
        raise ParamFileError(f"unsupported parameter file version {version}")

    offset = _HEADER.size
    arrays: Dict[str, np.ndarray] = {}
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            name = payload[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (ndim,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", payload, offset)
            offset += 4 * ndim
            n = int(np.prod(shape)) if ndim else 1
            if offset + 4 * n > len(payload):
                raise ParamFileError(f"array {name!r} truncated")
            arrays[name] = np.frombuffer(payload, dtype="<f4", count=n, offset=offset).reshape(shape)
            offset += 4 * n
    except (struct.error, UnicodeDecodeError) as e:
        raise ParamFileError(f"malformed parameter file: {e}") from e
    if offset != len(payload):
        raise ParamFileError(f"{len(payload) - offset} trailing bytes after last array")
    return n_heads, arrays


def load_params(path: Union[str, Path], config: EncoderConfig = DEFAULT_CONFIG.encoder) -> HeightmapEncoder:
    """Build an encoder from a parameter file; names and shapes must match."""
    with open(path, "rb") as f:
        n_heads, arrays = decode_params(f.read())
    if n_heads < 1 or config.d_model % n_heads:
        raise ParamFileError(f"head count {n_heads} does not divide d_model {config.d_model}")
    encoder = HeightmapEncoder(config.model_copy(update={"n_heads": n_heads}))
    expected = encoder.state_dict()
    if set(arrays) != set(expected):
        missing = sorted(set(expected) - set(arrays))
        extra = sorted(set(arrays) - set(expected))
        raise ParamFileError(f"parameter names mismatch; missing {missing}, unexpected {extra}")
    state = {}
    for name, ref in expected.items():
        arr = arrays[name]
        if tuple(arr.shape) != tuple(ref.shape):
            raise ParamFileError(f"{name}: shape {tuple(arr.shape)} != expected {tuple(ref.shape)}")
        if not np.all(np.isfinite(arr)):
            raise ParamFileError(f"{name}: non-finite values")
        state[name] = torch.from_numpy(arr.astype(np.float64))
    encoder.load_state_dict(state)
    logger.info(f"Loaded encoder parameters from {path}")
    return encoder
