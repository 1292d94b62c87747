"""Accuracy metrics for single-view predictions and teacher late fusion."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch

from ..data import MultiViewSample, PreprocessConfig, VideoClip, preprocess_clip
from ..distill import StudentNet, TeacherNet, predict_classes


@dataclass(frozen=True)
class AccuracyReport:
    overall: float
    per_view: dict[int, float]
    counts: dict[int, int]

    @property
    def n_total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class FusionReport:
    """Teacher accuracies on multi-view samples: each view alone vs fused."""

    per_view: dict[int, float]
    fused: float
    n_samples: int

    @property
    def best_single_view(self) -> float:
        return max(self.per_view.values())


def clips_to_batch(clips: Sequence[VideoClip], preprocess: PreprocessConfig) -> torch.Tensor:
    return torch.from_numpy(
        np.stack([preprocess_clip(c, preprocess) for c in clips])
    )


def evaluate_accuracy(
    model: StudentNet,
    clips: Sequence[VideoClip],
    preprocess: PreprocessConfig,
    batch_size: int = 64,
) -> AccuracyReport:
    """Fraction of correctly classified clips, overall and per view."""
    if not clips:
        raise ValueError("cannot evaluate on an empty clip list")
    was_training = model.training
    model.eval()
    correct: dict[int, int] = {}
    counts: dict[int, int] = {}
    with torch.no_grad():
        for start in range(0, len(clips), batch_size):
            chunk = clips[start : start + batch_size]
            preds = predict_classes(model(clips_to_batch(chunk, preprocess)))
            for clip, pred in zip(chunk, preds):
                counts[clip.view_id] = counts.get(clip.view_id, 0) + 1
                correct[clip.view_id] = correct.get(clip.view_id, 0) + int(pred == clip.label)
    if was_training:
        model.train()
    per_view = {v: correct[v] / counts[v] for v in sorted(counts)}
    overall = sum(correct.values()) / sum(counts.values())
    return AccuracyReport(overall=overall, per_view=per_view, counts=dict(sorted(counts.items())))


def evaluate_teacher_fusion(
    teacher: TeacherNet,
    samples: Sequence[MultiViewSample],
    views: Sequence[int],
    preprocess: PreprocessConfig,
    batch_size: int = 32,
) -> FusionReport:
    """Per-view and fused-logit accuracy of the teacher on whole samples."""
    if not samples:
        raise ValueError("cannot evaluate on an empty sample list")
    views = list(views)
    was_training = teacher.training
    teacher.eval()
    labels = np.array([s.label for s in samples])
    correct_view = {v: 0 for v in views}
    correct_fused = 0
    with torch.no_grad():
        for start in range(0, len(samples), batch_size):
            chunk = samples[start : start + batch_size]
            frames = {
                v: clips_to_batch([s.clips[v] for s in chunk], preprocess) for v in views
            }
            out = teacher(frames, views)
            chunk_labels = labels[start : start + len(chunk)]
            for v in views:
                correct_view[v] += int(
                    (predict_classes(out.per_view_logits[v]) == chunk_labels).sum()
                )
            correct_fused += int((predict_classes(out.fused_logits) == chunk_labels).sum())
    if was_training:
        teacher.train()
    n = len(samples)
    return FusionReport(
        per_view={v: correct_view[v] / n for v in views},
        fused=correct_fused / n,
        n_samples=n,
    )
