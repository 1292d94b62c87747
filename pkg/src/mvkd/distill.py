"""Teacher-student structure and losses.

The teacher runs one shared backbone over every training view and late-fuses
the per-view logits by arithmetic mean. The student runs its own backbone on
a single view. The student loss adds, per view, a KL divergence between the
teacher's class distribution and the student's, with the teacher treated as a
constant target:

    L_teacher = CE(fused logits, y)
    L_student = CE_mean + gamma * sum_v KL_v

In "separate" fusion mode KL_v targets the teacher's view-v logits; in
"joint" mode every view targets the fused logits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .backbone import Backbone, BackboneConfig

FUSION_MODES = ("separate", "joint")


@dataclass(frozen=True)
class LossWeights:
    gamma: float = 1.0
    temperature: float = 1.0
    n_views: int = 1

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not np.isfinite(self.temperature) or self.temperature <= 0:
            raise ValueError(f"temperature must be finite and > 0, got {self.temperature}")
        if self.n_views < 1:
            raise ValueError(f"n_views must be >= 1, got {self.n_views}")


@dataclass
class LossBreakdown:
    l_cls_teacher: torch.Tensor
    l_cls_student: torch.Tensor
    l_kld_per_view: dict[int, torch.Tensor]
    total_teacher: torch.Tensor
    total_student: torch.Tensor

    def scalars(self) -> dict[str, float]:
        """Loss terms as plain floats under the metrics-log key scheme."""
        out = {
            "teacher/cls": self.l_cls_teacher.detach().item(),
            "student/cls": self.l_cls_student.detach().item(),
        }
        for view_id in sorted(self.l_kld_per_view):
            out[f"student/kld/{view_id}"] = self.l_kld_per_view[view_id].detach().item()
        out["student/total"] = self.total_student.detach().item()
        return out


class TeacherOutput(NamedTuple):
    per_view_logits: dict[int, torch.Tensor]
    fused_logits: torch.Tensor


def cross_entropy(logits: torch.Tensor, labels) -> torch.Tensor:
    """-log softmax(logits)[label]; batched inputs average over the batch."""
    if logits.ndim == 1:
        logits = logits.unsqueeze(0)
        labels = torch.as_tensor([labels], device=logits.device)
    else:
        labels = torch.as_tensor(labels, device=logits.device)
    n_classes = logits.shape[-1]
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(
            f"labels must lie in [0, {n_classes}), got range "
            f"[{int(labels.min())}, {int(labels.max())}]"
        )
    log_probs = F.log_softmax(logits, dim=-1)
    return -log_probs.gather(-1, labels.view(-1, 1)).mean()


def kl_distill(
    teacher_logits: torch.Tensor, student_logits: torch.Tensor, temperature: float = 1.0
) -> torch.Tensor:
    """T^2 * KL(softmax(teacher/T) || softmax(student/T)).

    The teacher is a constant target: no gradient flows into it through this
    term. Batched inputs average over the batch.
    """
    if teacher_logits.shape != student_logits.shape:
        raise ValueError(
            f"logit shapes differ: {tuple(teacher_logits.shape)} vs {tuple(student_logits.shape)}"
        )
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    t_log = F.log_softmax(teacher_logits.detach() / temperature, dim=-1)
    s_log = F.log_softmax(student_logits / temperature, dim=-1)
    kl = (t_log.exp() * (t_log - s_log)).sum(dim=-1)
    # the mathematical value is >= 0; clamp away summation rounding noise
    return (temperature**2) * kl.mean().clamp_min(0.0)


class TeacherNet(nn.Module):
    """One backbone shared across views plus mean-of-logits late fusion."""

    def __init__(self, backbone: Backbone, fusion_mode: str = "separate"):
        super().__init__()
        if fusion_mode not in FUSION_MODES:
            raise ValueError(f"fusion_mode must be one of {FUSION_MODES}, got {fusion_mode!r}")
        self.backbone = backbone
        self.fusion_mode = fusion_mode

    @classmethod
    def from_config(cls, cfg: BackboneConfig, fusion_mode: str = "separate") -> "TeacherNet":
        return cls(Backbone(cfg), fusion_mode=fusion_mode)

    def forward(
        self, frames_by_view: Mapping[int, torch.Tensor], views: Sequence[int]
    ) -> TeacherOutput:
        missing = [v for v in views if v not in frames_by_view]
        if missing:
            raise ValueError(f"teacher input lacks views {missing}")
        per_view = {v: self.backbone(frames_by_view[v]).logits for v in views}
        fused = torch.stack([per_view[v] for v in views]).mean(dim=0)
        return TeacherOutput(per_view_logits=per_view, fused_logits=fused)


class StudentNet(nn.Module):
    """A view-agnostic single-view classifier."""

    def __init__(self, backbone: Backbone):
        super().__init__()
        self.backbone = backbone

    @classmethod
    def from_config(cls, cfg: BackboneConfig) -> "StudentNet":
        return cls(Backbone(cfg))

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        return self.backbone(frames).logits


def student_losses(
    teacher_out: TeacherOutput,
    student_logits_per_view: Mapping[int, torch.Tensor],
    labels,
    weights: LossWeights,
    fusion_mode: str = "separate",
) -> LossBreakdown:
    if fusion_mode not in FUSION_MODES:
        raise ValueError(f"fusion_mode must be one of {FUSION_MODES}, got {fusion_mode!r}")
    views = sorted(teacher_out.per_view_logits)
    missing = [v for v in views if v not in student_logits_per_view]
    if missing:
        raise ValueError(f"student logits missing for views {missing}")

    l_cls_teacher = cross_entropy(teacher_out.fused_logits, labels)
    l_cls_student = torch.stack(
        [cross_entropy(student_logits_per_view[v], labels) for v in views]
    ).mean()
    l_kld = {}
    for v in views:
        target = (
            teacher_out.per_view_logits[v]
            if fusion_mode == "separate"
            else teacher_out.fused_logits
        )
        l_kld[v] = kl_distill(target, student_logits_per_view[v], weights.temperature)
    kld_sum = torch.stack(list(l_kld.values())).sum() if l_kld else l_cls_student.new_zeros(())
    return LossBreakdown(
        l_cls_teacher=l_cls_teacher,
        l_cls_student=l_cls_student,
        l_kld_per_view=l_kld,
        total_teacher=l_cls_teacher,
        total_student=l_cls_student + weights.gamma * kld_sum,
    )


def predict_classes(logits: torch.Tensor) -> np.ndarray:
    """Argmax class indices, ties broken toward the lowest index."""
    array = logits.detach().cpu().numpy()
    if array.ndim == 1:
        array = array[None]
    return np.argmax(array, axis=-1)


def student_predict(student: StudentNet, frames: torch.Tensor) -> int:
    """Predicted class of a single preprocessed clip [T, H, W, 3]."""
    with torch.no_grad():
        logits = student(frames.unsqueeze(0))
    return int(predict_classes(logits)[0])
