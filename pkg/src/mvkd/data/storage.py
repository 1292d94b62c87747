"""On-disk dataset format.

Clip file (binary, little-endian): magic ``MVK1``, then u32 L, H, W, C(=3),
then L*H*W*C float32 values in (frame, row, col, channel) raster order.
A dataset directory holds ``manifest.json`` plus one clip file per
(sample, view).
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .types import Dataset, MultiViewSample, VideoClip

CLIP_MAGIC = b"MVK1"
MANIFEST_NAME = "manifest.json"


class DatasetFormatError(Exception):
    """Raised for malformed clip files or manifests; names the offending file."""


def write_clip(path: Path, frames: np.ndarray) -> None:
    frames = np.ascontiguousarray(frames, dtype=np.float32)
    if frames.ndim != 4 or frames.shape[-1] != 3:
        raise ValueError(f"expected [L, H, W, 3] frames, got shape {frames.shape}")
    header = CLIP_MAGIC + struct.pack("<4I", *frames.shape)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(header)
        f.write(frames.astype("<f4").tobytes())


def read_clip(path: Path) -> np.ndarray:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise DatasetFormatError(f"cannot read clip file {path}: {e}") from e
    if raw[:4] != CLIP_MAGIC:
        raise DatasetFormatError(f"bad magic in clip file {path}")
    if len(raw) < 20:
        raise DatasetFormatError(f"truncated header in clip file {path}")
    dims = struct.unpack("<4I", raw[4:20])
    expected = 20 + 4 * int(np.prod(dims))
    if len(raw) != expected:
        raise DatasetFormatError(
            f"clip file {path} holds {len(raw)} bytes, expected {expected} for dims {dims}"
        )
    return np.frombuffer(raw[20:], dtype="<f4").reshape(dims).copy()


def write_dataset(dataset: Dataset, root: Path) -> Path:
    """Write a dataset directory; returns the manifest path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest_samples = []
    for i, sample in enumerate(dataset.samples):
        clip_paths = {}
        for view_id in sorted(sample.clips):
            rel = f"clips/sample{i:05d}_view{view_id}.mvk"
            write_clip(root / rel, sample.clips[view_id].frames)
            clip_paths[str(view_id)] = rel
        manifest_samples.append(
            {"label": sample.label, "actor": sample.actor_id, "clips": clip_paths}
        )
    manifest = {
        "n_classes": dataset.n_classes,
        "view_ids": list(dataset.view_ids),
        "samples": manifest_samples,
    }
    manifest_path = root / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest_path


def read_dataset(root: Path) -> Dataset:
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DatasetFormatError(f"missing manifest {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"invalid JSON in manifest {manifest_path}: {e}") from e
    for key in ("n_classes", "view_ids", "samples"):
        if key not in manifest:
            raise DatasetFormatError(f"manifest {manifest_path} lacks key '{key}'")
    view_ids = tuple(int(v) for v in manifest["view_ids"])
    samples = []
    for entry in manifest["samples"]:
        clips = {}
        for view_str, rel in entry["clips"].items():
            view_id = int(view_str)
            frames = read_clip(root / rel)
            clips[view_id] = VideoClip(
                frames=frames,
                view_id=view_id,
                actor_id=int(entry["actor"]),
                label=int(entry["label"]),
            )
        samples.append(
            MultiViewSample(
                clips=clips, label=int(entry["label"]), actor_id=int(entry["actor"])
            )
        )
    return Dataset(samples=samples, view_ids=view_ids, n_classes=int(manifest["n_classes"]))
