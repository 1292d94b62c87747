"""Experiment configuration files (JSON), schema-checked before any work.

Unknown keys are rejected with the offending key path in the error message.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .backbone import BackboneConfig, StageConfig
from .data import Dataset, PreprocessConfig, SynthConfig, generate_synthetic_dataset, read_dataset
from .training import TrainConfig


class ConfigError(ValueError):
    pass


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key '{path}.{key}'" if path else f"unknown key '{key}'")


_TOP_KEYS = {"dataset", "synth", "output_dir", "backbone", "train", "split", "matrix"}
_SYNTH_KEYS = {
    "n_classes", "n_views", "n_actors", "clips_per_actor_per_class",
    "frames", "height", "width", "view_noise", "seed",
}
_BACKBONE_KEYS = {
    "patch_size", "embed_dim", "stages", "window", "mlp_ratio",
    "dropout", "drop_path", "n_classes",
}
_TRAIN_KEYS = {
    "lr", "epochs", "batch_size", "weight_decay", "beta1", "beta2", "eps",
    "seed", "mode", "fusion_mode", "gamma", "temperature",
    "baseline_pool_views", "frames_per_clip", "mean", "std",
    "keep_all_checkpoints",
}
_SPLIT_KEYS = {"test_view", "fold_index", "k_folds", "seed"}
_MATRIX_KEYS = {"k_folds", "modes", "views"}


@dataclass
class ExperimentConfig:
    dataset_path: str | None
    synth: SynthConfig | None
    output_dir: str | None
    backbone: dict
    train: dict
    split: dict
    matrix: dict

    def load_dataset(self) -> Dataset:
        if self.dataset_path is not None:
            return read_dataset(Path(self.dataset_path))
        if self.synth is not None:
            return generate_synthetic_dataset(self.synth)
        raise ConfigError("config must provide either 'dataset' or 'synth'")

    def backbone_config(self, n_classes: int) -> BackboneConfig:
        raw = self.backbone
        declared = raw.get("n_classes")
        if declared is not None and declared != n_classes:
            raise ConfigError(
                f"key 'backbone.n_classes' ({declared}) contradicts the dataset ({n_classes})"
            )
        kwargs = {}
        if "patch_size" in raw:
            kwargs["patch_size"] = tuple(raw["patch_size"])
        if "embed_dim" in raw:
            kwargs["embed_dim"] = int(raw["embed_dim"])
        if "stages" in raw:
            kwargs["stages"] = tuple(
                StageConfig(int(s["depth"]), int(s["heads"])) for s in raw["stages"]
            )
        if "window" in raw:
            kwargs["window"] = tuple(raw["window"])
        for key in ("mlp_ratio", "dropout", "drop_path"):
            if key in raw:
                kwargs[key] = float(raw[key])
        return BackboneConfig(n_classes=n_classes, **kwargs)

    def train_config(self, n_classes: int, out_dir: str) -> TrainConfig:
        raw = dict(self.train)
        preprocess = PreprocessConfig(
            frames_per_clip=int(raw.pop("frames_per_clip", 8)),
            mean=tuple(raw.pop("mean", (0.5, 0.5, 0.5))),
            std=tuple(raw.pop("std", (0.5, 0.5, 0.5))),
        )
        return TrainConfig(
            backbone=self.backbone_config(n_classes),
            preprocess=preprocess,
            dataset_path=self.dataset_path,
            test_view=int(self.split.get("test_view", 1)),
            fold_index=int(self.split.get("fold_index", 0)),
            k_folds=int(self.split.get("k_folds", 5)),
            split_seed=int(self.split.get("seed", 0)),
            out_dir=out_dir,
            **raw,
        )


def validate_experiment_dict(data: dict) -> None:
    _check_keys(data, _TOP_KEYS, "")
    if ("dataset" in data) == ("synth" in data):
        raise ConfigError("config must provide exactly one of 'dataset' or 'synth'")
    if "dataset" in data and not isinstance(data["dataset"], str):
        raise ConfigError("key 'dataset' must be a path string")
    if "synth" in data:
        _check_keys(data["synth"], _SYNTH_KEYS, "synth")
    if "backbone" in data:
        _check_keys(data["backbone"], _BACKBONE_KEYS, "backbone")
        for i, stage in enumerate(data["backbone"].get("stages", [])):
            _check_keys(stage, {"depth", "heads"}, f"backbone.stages[{i}]")
    if "train" in data:
        _check_keys(data["train"], _TRAIN_KEYS, "train")
    if "split" in data:
        _check_keys(data["split"], _SPLIT_KEYS, "split")
    if "matrix" in data:
        _check_keys(data["matrix"], _MATRIX_KEYS, "matrix")
        modes = data["matrix"].get("modes")
        if modes is not None and (
            not isinstance(modes, list) or not all(isinstance(m, str) for m in modes)
        ):
            raise ConfigError("key 'matrix.modes' must be a list of mode names")


def load_experiment_config(path: Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in config {path}: {e}") from e
    validate_experiment_dict(data)
    synth = None
    if "synth" in data:
        synth = SynthConfig(**data["synth"])
    return ExperimentConfig(
        dataset_path=data.get("dataset"),
        synth=synth,
        output_dir=data.get("output_dir"),
        backbone=data.get("backbone", {}),
        train=data.get("train", {}),
        split=data.get("split", {}),
        matrix=data.get("matrix", {}),
    )
