"""Clip pre-processing: temporal frame sampling and channel normalization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import VideoClip


@dataclass(frozen=True)
class PreprocessConfig:
    frames_per_clip: int = 8
    mean: tuple[float, float, float] = (0.5, 0.5, 0.5)
    std: tuple[float, float, float] = (0.5, 0.5, 0.5)


def sample_frame_indices(length: int, t: int) -> np.ndarray:
    """Center-of-bin frame indices: index i maps to floor((i + 0.5) * L / T).

    Short clips repeat frames; indices never exceed L - 1.
    """
    if length < 1:
        raise ValueError("clip must contain at least one frame")
    if t < 1:
        raise ValueError(f"frame count must be >= 1, got {t}")
    idx = np.floor((np.arange(t) + 0.5) * length / t).astype(np.int64)
    return np.minimum(idx, length - 1)


def sample_frames(clip: VideoClip, t: int) -> np.ndarray:
    """Resample a clip to exactly ``t`` frames, shape [t, H, W, 3]."""
    return clip.frames[sample_frame_indices(clip.length, t)]


def normalize_frames(frames: np.ndarray, mean, std) -> np.ndarray:
    """Per-channel (x - mean) / std; shape preserved."""
    mean = np.asarray(mean, dtype=np.float32)
    std = np.asarray(std, dtype=np.float32)
    if mean.shape != (3,) or std.shape != (3,):
        raise ValueError("mean and std must each have three components")
    if np.any(std <= 0):
        raise ValueError("std components must be positive")
    return (np.asarray(frames, dtype=np.float32) - mean) / std


def denormalize_frames(frames: np.ndarray, mean, std) -> np.ndarray:
    """Inverse of :func:`normalize_frames`."""
    mean = np.asarray(mean, dtype=np.float32)
    std = np.asarray(std, dtype=np.float32)
    if np.any(std <= 0):
        raise ValueError("std components must be positive")
    return np.asarray(frames, dtype=np.float32) * std + mean


def preprocess_clip(clip: VideoClip, cfg: PreprocessConfig) -> np.ndarray:
    """Sampled and normalized network input, shape [T, H, W, 3] float32."""
    return normalize_frames(sample_frames(clip, cfg.frames_per_clip), cfg.mean, cfg.std)
