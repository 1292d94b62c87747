"""The cross-view experiment grid: every (held-out view, actor fold, mode)
combination trained and scored on the held-out view."""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from ..data import Dataset, make_split_plans
from .loop import RunArtifacts, TrainConfig, train_run

DEFAULT_MODES = ("multi_view_distilled", "single_view_baseline")


@dataclass(frozen=True)
class MatrixRow:
    view: int
    mode: str
    fold: int
    accuracy: float


@dataclass(frozen=True)
class MatrixAggregate:
    view: int
    mode: str
    mean: float
    std: float


@dataclass
class MatrixResult:
    rows: list[MatrixRow]
    aggregates: list[MatrixAggregate]
    run_dirs: list[Path]


def aggregate_rows(rows: Sequence[MatrixRow]) -> list[MatrixAggregate]:
    """Mean and population standard deviation of accuracy over folds."""
    grouped: dict[tuple[int, str], list[float]] = {}
    for row in rows:
        grouped.setdefault((row.view, row.mode), []).append(row.accuracy)
    aggregates = []
    for (view, mode), values in sorted(grouped.items()):
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        aggregates.append(MatrixAggregate(view=view, mode=mode, mean=mean, std=var**0.5))
    return aggregates


def write_fold_csv(rows: Sequence[MatrixRow], path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["view", "mode", "fold", "accuracy"])
        for row in rows:
            writer.writerow([row.view, row.mode, row.fold, f"{row.accuracy:.6f}"])


def write_summary_csv(aggregates: Sequence[MatrixAggregate], path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["view", "mode", "mean", "std"])
        for agg in aggregates:
            writer.writerow([agg.view, agg.mode, f"{agg.mean:.6f}", f"{agg.std:.6f}"])


def run_experiment_matrix(
    dataset: Dataset,
    base_cfg: TrainConfig,
    k_folds: int,
    modes: Sequence[str] = DEFAULT_MODES,
    views: Sequence[int] | None = None,
    out_dir: str | Path = "matrix",
) -> MatrixResult:
    if len(dataset.view_ids) < 2:
        raise ValueError("the cross-view protocol needs at least two views")
    if not modes:
        raise ValueError("at least one mode is required")
    plans = make_split_plans(dataset, k_folds, base_cfg.split_seed, views=views)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[MatrixRow] = []
    run_dirs: list[Path] = []
    for plan_idx, plan in enumerate(plans):
        for mode_idx, mode in enumerate(modes):
            run_dir = out_dir / f"view{plan.test_view}" / f"fold{plan.fold_index}" / mode
            cfg = replace(
                base_cfg,
                mode=mode,
                test_view=plan.test_view,
                fold_index=plan.fold_index,
                k_folds=k_folds,
                out_dir=str(run_dir),
                seed=base_cfg.seed + len(modes) * plan_idx + mode_idx,
            )
            artifacts = train_run(cfg, dataset=dataset, plan=plan)
            rows.append(
                MatrixRow(
                    view=plan.test_view,
                    mode=mode,
                    fold=plan.fold_index,
                    accuracy=artifacts.val_accuracy.overall,
                )
            )
            run_dirs.append(artifacts.out_dir)

    aggregates = aggregate_rows(rows)
    write_fold_csv(rows, out_dir / "summary_folds.csv")
    write_summary_csv(aggregates, out_dir / "summary.csv")
    return MatrixResult(rows=rows, aggregates=aggregates, run_dirs=run_dirs)
