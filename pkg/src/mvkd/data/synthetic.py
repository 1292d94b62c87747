"""Deterministic synthetic multi-view clips: a bright blob moving on a dark
background, with one motion pattern per class and a fixed geometric transform
per camera view."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Dataset, MultiViewSample, VideoClip

# Spatial patch edge of the default backbone; generated geometry must divide it.
DEFAULT_SPATIAL_PATCH = 4

_BACKGROUND = 0.02
_PEAK = 0.93
_AMPLITUDE = 0.30      # trajectory half-length, fraction of frame
_WOBBLE = 0.08         # oscillation amplitude perpendicular to the direction
_ACTOR_JITTER = 0.04   # per-actor start-point offset
_CLIP_JITTER = 0.015   # per-clip start-point offset
_SIGMA = 0.05          # blob radius, fraction of frame


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int = 4
    n_views: int = 3
    n_actors: int = 10
    clips_per_actor_per_class: int = 3
    frames: int = 16
    height: int = 32
    width: int = 32
    view_noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("n_classes", "n_views", "n_actors", "clips_per_actor_per_class",
                     "frames", "height", "width"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.view_noise < 0:
            raise ValueError(f"view_noise must be >= 0, got {self.view_noise}")
        if self.height % DEFAULT_SPATIAL_PATCH or self.width % DEFAULT_SPATIAL_PATCH:
            raise ValueError(
                f"height and width must be divisible by {DEFAULT_SPATIAL_PATCH}, "
                f"got {self.height}x{self.width}"
            )


def class_motion_params(label: int, n_classes: int) -> tuple[float, float]:
    """(direction angle, wobble frequency) of a class's trajectory.

    Directions are spread evenly with a small offset so that no horizontal
    flip of one class's direction lands on another class.
    """
    angle = 2.0 * np.pi * label / n_classes + np.pi / 8.0
    freq = 1.0 + (label % 2)
    return angle, freq


def view_transform_params(view_id: int) -> tuple[bool, float, tuple[float, float]]:
    """Fixed (flip_x, scale, (dx, dy)) applied to trajectories of one view."""
    flip_x = view_id % 2 == 0
    scale = 1.0 - 0.12 * ((view_id - 1) % 3)
    dx = 0.04 * ((view_id - 1) % 3) - 0.04
    dy = 0.03 * (view_id % 3) - 0.03
    return flip_x, scale, (dx, dy)


def _trajectory(cfg: SynthConfig, label: int, actor_id: int, clip_idx: int) -> np.ndarray:
    """Blob center per frame in normalized [0,1]^2 coordinates, before the
    per-view transform. Shape [L, 2] as (x, y)."""
    angle, freq = class_motion_params(label, cfg.n_classes)
    actor_rng = np.random.default_rng([cfg.seed, 1, actor_id])
    center = 0.5 + actor_rng.uniform(-_ACTOR_JITTER, _ACTOR_JITTER, size=2)
    phase = actor_rng.uniform(0.0, 2.0 * np.pi)
    speed = actor_rng.uniform(0.9, 1.1)
    clip_rng = np.random.default_rng([cfg.seed, 2, actor_id, label, clip_idx])
    center = center + clip_rng.uniform(-_CLIP_JITTER, _CLIP_JITTER, size=2)

    tau = np.linspace(0.0, 1.0, cfg.frames) if cfg.frames > 1 else np.zeros(1)
    along = _AMPLITUDE * speed * (2.0 * tau - 1.0)
    across = _WOBBLE * np.sin(2.0 * np.pi * freq * tau + phase)
    direction = np.array([np.cos(angle), np.sin(angle)])
    perp = np.array([-np.sin(angle), np.cos(angle)])
    return center + along[:, None] * direction + across[:, None] * perp


def _apply_view(points: np.ndarray, view_id: int) -> np.ndarray:
    flip_x, scale, (dx, dy) = view_transform_params(view_id)
    out = points.copy()
    if flip_x:
        out[:, 0] = 1.0 - out[:, 0]
    out = 0.5 + scale * (out - 0.5)
    out[:, 0] += dx
    out[:, 1] += dy
    return out


def _render(cfg: SynthConfig, points: np.ndarray) -> np.ndarray:
    ys = (np.arange(cfg.height) + 0.5) / cfg.height
    xs = (np.arange(cfg.width) + 0.5) / cfg.width
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    frames = np.empty((cfg.frames, cfg.height, cfg.width, 3), dtype=np.float32)
    for t, (px, py) in enumerate(points):
        blob = np.exp(-((gx - px) ** 2 + (gy - py) ** 2) / (2.0 * _SIGMA**2))
        frame = _BACKGROUND + (_PEAK - _BACKGROUND) * blob
        frames[t] = frame[..., None]
    return frames


def generate_clip(cfg: SynthConfig, label: int, actor_id: int, clip_idx: int,
                  view_id: int) -> VideoClip:
    points = _apply_view(_trajectory(cfg, label, actor_id, clip_idx), view_id)
    frames = _render(cfg, points)
    if cfg.view_noise > 0:
        noise_rng = np.random.default_rng(
            [cfg.seed, 3, actor_id, label, clip_idx, view_id]
        )
        frames = frames + noise_rng.normal(
            0.0, cfg.view_noise, size=frames.shape
        ).astype(np.float32)
    frames = np.clip(frames, 0.0, 1.0)
    return VideoClip(frames=frames, view_id=view_id, actor_id=actor_id, label=label)


def generate_synthetic_dataset(cfg: SynthConfig) -> Dataset:
    """All (class x actor x clip) action instances, each captured by every view."""
    view_ids = tuple(range(1, cfg.n_views + 1))
    samples = []
    for actor_id in range(cfg.n_actors):
        for label in range(cfg.n_classes):
            for clip_idx in range(cfg.clips_per_actor_per_class):
                clips = {
                    v: generate_clip(cfg, label, actor_id, clip_idx, v)
                    for v in view_ids
                }
                samples.append(
                    MultiViewSample(clips=clips, label=label, actor_id=actor_id)
                )
    return Dataset(samples=samples, view_ids=view_ids, n_classes=cfg.n_classes)
