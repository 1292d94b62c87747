"""Checkpoint files: a JSON header plus named float32 parameter rasters.

Layout (little-endian): magic ``MVKC``, u32 version, u32 header length,
UTF-8 JSON header, then each tensor's float32 values in row-major order, in
the order listed by the header's ``tensors`` entry.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

CKPT_MAGIC = b"MVKC"
CKPT_VERSION = 1


class CheckpointFormatError(Exception):
    pass


def save_checkpoint(path: Path, tensors: dict[str, torch.Tensor], header: dict) -> None:
    """``header`` carries the config snapshot (including a "backbone" object);
    tensor names/shapes are appended to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(tensors)
    meta = dict(header)
    meta["tensors"] = [
        {"name": name, "shape": list(tensors[name].shape)} for name in names
    ]
    header_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(CKPT_MAGIC)
        f.write(struct.pack("<II", CKPT_VERSION, len(header_bytes)))
        f.write(header_bytes)
        for name in names:
            tensor = tensors[name].detach().cpu()
            if tensor.dtype != torch.float32:
                raise ValueError(f"tensor {name} must be float32, got {tensor.dtype}")
            f.write(tensor.numpy().astype("<f4", copy=False).tobytes())


def load_checkpoint(path: Path) -> tuple[dict[str, torch.Tensor], dict]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CheckpointFormatError(f"cannot read checkpoint {path}: {e}") from e
    if raw[:4] != CKPT_MAGIC:
        raise CheckpointFormatError(f"bad magic in checkpoint {path}")
    if len(raw) < 12:
        raise CheckpointFormatError(f"truncated checkpoint {path}")
    version, header_len = struct.unpack("<II", raw[4:12])
    if version != CKPT_VERSION:
        raise CheckpointFormatError(f"unsupported checkpoint version {version} in {path}")
    try:
        header = json.loads(raw[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(f"invalid header in checkpoint {path}: {e}") from e
    offset = 12 + header_len
    tensors: dict[str, torch.Tensor] = {}
    for entry in header.get("tensors", []):
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 4 * count
        if end > len(raw):
            raise CheckpointFormatError(f"truncated tensor data in checkpoint {path}")
        values = np.frombuffer(raw[offset:end], dtype="<f4").reshape(shape).copy()
        tensors[entry["name"]] = torch.from_numpy(values)
        offset = end
    if offset != len(raw):
        raise CheckpointFormatError(f"trailing bytes in checkpoint {path}")
    header = {k: v for k, v in header.items() if k != "tensors"}
    return tensors, header
