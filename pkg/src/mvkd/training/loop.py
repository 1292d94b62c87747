"""Joint teacher/student training: both networks update every step, with the
student's distillation targets detached from the teacher graph."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..backbone import (
    BackboneConfig,
    config_from_dict,
    config_to_dict,
    load_checkpoint,
    save_checkpoint,
)
from ..data import (
    Dataset,
    MultiViewSample,
    PreprocessConfig,
    SplitPlan,
    make_cross_view_split,
    preprocess_clip,
    read_dataset,
    stratified_actor_folds,
)
from ..distill import LossWeights, StudentNet, TeacherNet, cross_entropy, student_losses
from .evaluate import AccuracyReport, FusionReport, evaluate_accuracy, evaluate_teacher_fusion
from .optim import AdamW, AdamWConfig

RUN_MODES = ("multi_view_distilled", "single_view_baseline")


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-4
    epochs: int = 15
    batch_size: int = 8
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    mode: str = "multi_view_distilled"
    fusion_mode: str = "separate"
    gamma: float = 1.0
    temperature: float = 1.0
    baseline_pool_views: bool = False
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    dataset_path: str | None = None
    test_view: int = 1
    fold_index: int = 0
    k_folds: int = 5
    split_seed: int = 0
    out_dir: str = "runs/default"
    keep_all_checkpoints: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.mode not in RUN_MODES:
            raise ValueError(f"mode must be one of {RUN_MODES}, got {self.mode!r}")
        # delegates range checks for lr / betas / eps / weight_decay
        self.optimizer_config()
        LossWeights(gamma=self.gamma, temperature=self.temperature)

    def optimizer_config(self) -> AdamWConfig:
        return AdamWConfig(
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            weight_decay=self.weight_decay,
        )


@dataclass
class RunArtifacts:
    out_dir: Path
    config_path: Path
    metrics_path: Path
    result_path: Path
    last_checkpoint: Path
    best_checkpoint: Path
    val_accuracy: AccuracyReport
    teacher_train_fusion: FusionReport | None
    teacher_heldout_fusion: FusionReport | None
    config_snapshot: dict


def train_config_to_dict(cfg: TrainConfig) -> dict:
    return {
        "lr": cfg.lr,
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "weight_decay": cfg.weight_decay,
        "beta1": cfg.beta1,
        "beta2": cfg.beta2,
        "eps": cfg.eps,
        "seed": cfg.seed,
        "mode": cfg.mode,
        "fusion_mode": cfg.fusion_mode,
        "gamma": cfg.gamma,
        "temperature": cfg.temperature,
        "baseline_pool_views": cfg.baseline_pool_views,
        "backbone": config_to_dict(cfg.backbone),
        "preprocess": {
            "frames_per_clip": cfg.preprocess.frames_per_clip,
            "mean": list(cfg.preprocess.mean),
            "std": list(cfg.preprocess.std),
        },
        "dataset_path": cfg.dataset_path,
        "test_view": cfg.test_view,
        "fold_index": cfg.fold_index,
        "k_folds": cfg.k_folds,
        "split_seed": cfg.split_seed,
        "out_dir": cfg.out_dir,
        "keep_all_checkpoints": cfg.keep_all_checkpoints,
    }


def train_config_from_dict(data: dict) -> TrainConfig:
    data = dict(data)
    backbone = config_from_dict(data.pop("backbone")) if "backbone" in data else BackboneConfig()
    pre = data.pop("preprocess", None)
    preprocess = (
        PreprocessConfig(
            frames_per_clip=int(pre["frames_per_clip"]),
            mean=tuple(pre["mean"]),
            std=tuple(pre["std"]),
        )
        if pre
        else PreprocessConfig()
    )
    return TrainConfig(backbone=backbone, preprocess=preprocess, **data)


def resolve_plan(cfg: TrainConfig, dataset: Dataset) -> SplitPlan:
    folds = stratified_actor_folds(dataset.actors, cfg.k_folds, cfg.split_seed)
    if cfg.test_view not in dataset.view_ids:
        raise ValueError(f"test view {cfg.test_view} not in dataset views {dataset.view_ids}")
    train_actors, val_actors = folds[cfg.fold_index]
    return SplitPlan(
        test_view=cfg.test_view,
        fold_index=cfg.fold_index,
        k_folds=cfg.k_folds,
        train_actors=train_actors,
        val_actors=val_actors,
        train_views=tuple(v for v in dataset.view_ids if v != cfg.test_view),
    )


def baseline_train_view(train_views, test_view: int) -> int:
    """The remaining view numerically closest to the held-out view."""
    return min(train_views, key=lambda v: (abs(v - test_view), v))


def _samples_to_tensors(
    samples: list[MultiViewSample], views, preprocess: PreprocessConfig
) -> dict[int, torch.Tensor]:
    return {
        v: torch.from_numpy(
            np.stack([preprocess_clip(s.clips[v], preprocess) for s in samples])
        )
        for v in views
    }


class _MetricsLog:
    def __init__(self, path: Path):
        self.path = path
        self._fh = open(path, "w")

    def write(self, record: dict) -> None:
        self._fh.write(json.dumps(record) + "\n")

    def close(self) -> None:
        self._fh.close()


def _save_nets(path: Path, cfg: TrainConfig, dataset: Dataset, plan: SplitPlan,
               teacher: TeacherNet | None, student: StudentNet, epoch: int,
               val_acc: float) -> None:
    tensors: dict[str, torch.Tensor] = {}
    if teacher is not None:
        for name, p in teacher.named_parameters():
            tensors[f"teacher.{name}"] = p
    for name, p in student.named_parameters():
        tensors[f"student.{name}"] = p
    header = {
        "backbone": config_to_dict(cfg.backbone),
        "n_classes": dataset.n_classes,
        "view_ids": list(dataset.view_ids),
        "train_views": list(plan.train_views),
        "test_view": plan.test_view,
        "mode": cfg.mode,
        "fusion_mode": cfg.fusion_mode,
        "preprocess": {
            "frames_per_clip": cfg.preprocess.frames_per_clip,
            "mean": list(cfg.preprocess.mean),
            "std": list(cfg.preprocess.std),
        },
        "epoch": epoch,
        "val_accuracy": val_acc,
    }
    save_checkpoint(path, tensors, header)


def load_student_checkpoint(path: Path) -> tuple[StudentNet, PreprocessConfig, dict]:
    """Rebuild the student network (and its preprocessing) from a checkpoint."""
    tensors, header = load_checkpoint(path)
    backbone_cfg = config_from_dict(header["backbone"])
    student = StudentNet.from_config(backbone_cfg)
    state = {
        name.removeprefix("student."): tensor
        for name, tensor in tensors.items()
        if name.startswith("student.")
    }
    student.load_state_dict(state)
    student.eval()
    pre = header.get("preprocess", {})
    preprocess = PreprocessConfig(
        frames_per_clip=int(pre.get("frames_per_clip", 8)),
        mean=tuple(pre.get("mean", (0.5, 0.5, 0.5))),
        std=tuple(pre.get("std", (0.5, 0.5, 0.5))),
    )
    return student, preprocess, header


def train_run(
    cfg: TrainConfig,
    dataset: Dataset | None = None,
    plan: SplitPlan | None = None,
) -> RunArtifacts:
    """Run one training job end to end; fully deterministic given cfg.seed."""
    if dataset is None:
        if cfg.dataset_path is None:
            raise ValueError("either a dataset or cfg.dataset_path is required")
        dataset = read_dataset(Path(cfg.dataset_path))
    if cfg.backbone.n_classes != dataset.n_classes:
        raise ValueError(
            f"backbone expects {cfg.backbone.n_classes} classes, dataset has {dataset.n_classes}"
        )
    if plan is None:
        plan = resolve_plan(cfg, dataset)
    shape = dataset.samples[0].clips[dataset.view_ids[0]].frames.shape
    cfg.backbone.validate_geometry((cfg.preprocess.frames_per_clip, shape[1], shape[2]))
    train_samples, val_clips = make_cross_view_split(dataset, plan)
    if not train_samples or not val_clips:
        raise ValueError("split produced an empty train or validation set")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot = {
        "train": train_config_to_dict(cfg),
        "plan": {
            "test_view": plan.test_view,
            "fold_index": plan.fold_index,
            "k_folds": plan.k_folds,
            "train_actors": sorted(plan.train_actors),
            "val_actors": sorted(plan.val_actors),
            "train_views": list(plan.train_views),
        },
    }
    config_path = out_dir / "config.json"
    config_path.write_text(json.dumps(snapshot, indent=1, sort_keys=True) + "\n")

    torch.manual_seed(cfg.seed)
    distilled = cfg.mode == "multi_view_distilled"
    views = list(plan.train_views)
    weights = LossWeights(gamma=cfg.gamma, temperature=cfg.temperature, n_views=len(views))
    teacher = TeacherNet.from_config(cfg.backbone, cfg.fusion_mode) if distilled else None
    student = StudentNet.from_config(cfg.backbone)
    teacher_opt = AdamW(teacher.parameters(), cfg.optimizer_config()) if teacher else None
    student_opt = AdamW(student.parameters(), cfg.optimizer_config())

    labels_np = np.array([s.label for s in train_samples], dtype=np.int64)
    if distilled:
        frames = _samples_to_tensors(train_samples, views, cfg.preprocess)
        labels = torch.from_numpy(labels_np)
        n_units = len(train_samples)
    else:
        if cfg.baseline_pool_views:
            pool = [s.clips[v] for s in train_samples for v in views]
        else:
            view = baseline_train_view(views, plan.test_view)
            pool = [s.clips[view] for s in train_samples]
        single = torch.from_numpy(
            np.stack([preprocess_clip(c, cfg.preprocess) for c in pool])
        )
        labels = torch.from_numpy(np.array([c.label for c in pool], dtype=np.int64))
        n_units = len(pool)

    metrics = _MetricsLog(out_dir / "metrics.ndjson")
    kept: dict[str, Path] = {}
    best_val = -1.0
    best_epoch = -1
    global_step = 0
    try:
        for epoch in range(cfg.epochs):
            order = np.random.default_rng([cfg.seed, 1000 + epoch]).permutation(n_units)
            epoch_terms: dict[str, list[float]] = {}
            for start in range(0, n_units, cfg.batch_size):
                idx = torch.from_numpy(order[start : start + cfg.batch_size].copy())
                if distilled:
                    batch_frames = {v: frames[v][idx] for v in views}
                    teacher_out = teacher(batch_frames, views)
                    student_logits = {v: student(batch_frames[v]) for v in views}
                    breakdown = student_losses(
                        teacher_out, student_logits, labels[idx], weights, cfg.fusion_mode
                    )
                    loss = breakdown.total_teacher + breakdown.total_student
                    teacher_opt.zero_grad()
                    student_opt.zero_grad()
                    loss.backward()
                    teacher_opt.step()
                    student_opt.step()
                    terms = breakdown.scalars()
                else:
                    logits = student(single[idx])
                    loss = cross_entropy(logits, labels[idx])
                    student_opt.zero_grad()
                    loss.backward()
                    student_opt.step()
                    terms = {"student/cls": float(loss), "student/total": float(loss)}
                global_step += 1
                metrics.write({"kind": "step", "epoch": epoch, "step": global_step, **terms})
                for key, value in terms.items():
                    epoch_terms.setdefault(key, []).append(value)

            val_report = evaluate_accuracy(student, val_clips, cfg.preprocess)
            epoch_means = {k: sum(vs) / len(vs) for k, vs in epoch_terms.items()}
            metrics.write(
                {
                    "kind": "epoch",
                    "epoch": epoch,
                    "step": global_step,
                    **epoch_means,
                    "val/acc": val_report.overall,
                }
            )

            ckpt_path = out_dir / f"epoch_{epoch + 1:03d}.ckpt"
            _save_nets(ckpt_path, cfg, dataset, plan, teacher, student,
                       epoch + 1, val_report.overall)
            kept[f"epoch{epoch + 1}"] = ckpt_path
            if val_report.overall > best_val:
                best_val = val_report.overall
                best_epoch = epoch + 1
            if not cfg.keep_all_checkpoints:
                for key, path in list(kept.items()):
                    e = int(key.removeprefix("epoch"))
                    if e not in (best_epoch, epoch + 1):
                        path.unlink(missing_ok=True)
                        del kept[key]
    finally:
        metrics.close()

    teacher_train = teacher_heldout = None
    if distilled:
        teacher_train = evaluate_teacher_fusion(teacher, train_samples, views, cfg.preprocess)
        heldout = [
            s.restricted_to(views)
            for s in dataset.samples
            if s.actor_id in plan.val_actors
        ]
        teacher_heldout = evaluate_teacher_fusion(teacher, heldout, views, cfg.preprocess)

    final_val = evaluate_accuracy(student, val_clips, cfg.preprocess)
    result = {
        "val_accuracy": final_val.overall,
        "val_per_view": {str(v): a for v, a in final_val.per_view.items()},
        "best_epoch": best_epoch,
        "best_val_accuracy": best_val,
    }
    if teacher_train is not None:
        result["teacher_train_fused_accuracy"] = teacher_train.fused
        result["teacher_train_per_view"] = {str(v): a for v, a in teacher_train.per_view.items()}
        result["teacher_heldout_fused_accuracy"] = teacher_heldout.fused
        result["teacher_heldout_per_view"] = {
            str(v): a for v, a in teacher_heldout.per_view.items()
        }
    result_path = out_dir / "result.json"
    result_path.write_text(json.dumps(result, indent=1, sort_keys=True) + "\n")

    return RunArtifacts(
        out_dir=out_dir,
        config_path=config_path,
        metrics_path=out_dir / "metrics.ndjson",
        result_path=result_path,
        last_checkpoint=out_dir / f"epoch_{cfg.epochs:03d}.ckpt",
        best_checkpoint=out_dir / f"epoch_{best_epoch:03d}.ckpt",
        val_accuracy=final_val,
        teacher_train_fusion=teacher_train,
        teacher_heldout_fusion=teacher_heldout,
        config_snapshot=snapshot,
    )
