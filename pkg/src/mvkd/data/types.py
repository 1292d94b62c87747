"""Core data containers: clips, multi-view samples, datasets."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class VideoClip:
    """One RGB frame sequence from one camera view of one actor.

    ``frames`` is a float32 array of shape [L, H, W, 3] with values in [0, 1].
    """

    frames: np.ndarray
    view_id: int
    actor_id: int
    label: int

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float32)
        if frames.ndim != 4 or frames.shape[-1] != 3:
            raise ValueError(f"frames must have shape [L, H, W, 3], got {frames.shape}")
        if frames.shape[0] < 1:
            raise ValueError("clip must contain at least one frame")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite values")
        if frames.min() < 0.0 or frames.max() > 1.0:
            raise ValueError("frame values must lie in [0, 1]")
        if self.view_id < 1:
            raise ValueError(f"view_id must be >= 1, got {self.view_id}")
        if self.actor_id < 0:
            raise ValueError(f"actor_id must be >= 0, got {self.actor_id}")
        if self.label < 0:
            raise ValueError(f"label must be >= 0, got {self.label}")
        self.frames = frames

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def geometry(self) -> tuple[int, int, int]:
        return tuple(self.frames.shape[:3])


@dataclass
class MultiViewSample:
    """Synchronized per-view clips of one action instance sharing one label."""

    clips: dict[int, VideoClip]
    label: int
    actor_id: int

    def __post_init__(self):
        if not self.clips:
            raise ValueError("sample must contain at least one view")
        for view_id, clip in self.clips.items():
            if clip.view_id != view_id:
                raise ValueError(
                    f"clip keyed as view {view_id} carries view_id={clip.view_id}"
                )
            if clip.label != self.label:
                raise ValueError(
                    f"view {view_id} clip label {clip.label} != sample label {self.label}"
                )
            if clip.actor_id != self.actor_id:
                raise ValueError(
                    f"view {view_id} clip actor {clip.actor_id} != sample actor {self.actor_id}"
                )

    @property
    def view_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.clips))

    def restricted_to(self, views) -> "MultiViewSample":
        """Copy of this sample keeping only the given views."""
        views = set(views)
        missing = views - set(self.clips)
        if missing:
            raise ValueError(f"sample lacks views {sorted(missing)}")
        return MultiViewSample(
            clips={v: self.clips[v] for v in sorted(views)},
            label=self.label,
            actor_id=self.actor_id,
        )


@dataclass
class Dataset:
    """A multi-view action dataset: samples all covering the same view set."""

    samples: list[MultiViewSample]
    view_ids: tuple[int, ...]
    n_classes: int
    actors: frozenset[int] = field(init=False)

    def __post_init__(self):
        self.view_ids = tuple(self.view_ids)
        if len(set(self.view_ids)) != len(self.view_ids):
            raise ValueError("view_ids contains duplicates")
        if self.n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        expected = set(self.view_ids)
        for i, sample in enumerate(self.samples):
            if set(sample.clips) != expected:
                raise ValueError(
                    f"sample {i} covers views {sample.view_ids}, dataset requires {self.view_ids}"
                )
            if not 0 <= sample.label < self.n_classes:
                raise ValueError(
                    f"sample {i} label {sample.label} out of range [0, {self.n_classes})"
                )
        self.actors = frozenset(s.actor_id for s in self.samples)

    def __len__(self) -> int:
        return len(self.samples)
