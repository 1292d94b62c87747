"""Command line entry points: gen-data, train, eval, matrix, report."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .backbone import CheckpointFormatError
from .data import DatasetFormatError, SynthConfig, generate_synthetic_dataset, read_dataset, write_dataset
from .expconfig import ConfigError, load_experiment_config
from .report import matrix_table, render_csv, render_grid
from .training import (
    DEFAULT_MODES,
    MatrixAggregate,
    evaluate_accuracy,
    load_student_checkpoint,
    run_experiment_matrix,
    train_run,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, required=True, help="experiment config JSON")
    parser.add_argument("--out", type=Path, default=None, help="override the output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the training seed")
    parser.add_argument("--serial", action="store_true",
                        help="force single-threaded deterministic execution")


def _apply_serial(serial: bool) -> None:
    if serial:
        import torch

        torch.set_num_threads(1)


def _resolve_out(cfg_output_dir: str | None, flag: Path | None, command: str) -> Path:
    if flag is not None:
        return flag
    if cfg_output_dir is not None:
        return Path(cfg_output_dir)
    raise ConfigError(f"{command} needs an output directory (config 'output_dir' or --out)")


def cmd_gen_data(args) -> int:
    cfg = SynthConfig(
        n_classes=args.classes,
        n_views=args.views,
        n_actors=args.actors,
        clips_per_actor_per_class=args.clips,
        frames=args.frames,
        height=args.height,
        width=args.width,
        view_noise=args.view_noise,
        seed=args.seed,
    )
    dataset = generate_synthetic_dataset(cfg)
    manifest = write_dataset(dataset, args.out)
    print(manifest)
    return 0


def cmd_train(args) -> int:
    exp = load_experiment_config(args.config)
    dataset = exp.load_dataset()
    out_dir = _resolve_out(exp.output_dir, args.out, "train")
    cfg = exp.train_config(dataset.n_classes, str(out_dir))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    _apply_serial(args.serial)
    artifacts = train_run(cfg, dataset=dataset)
    print(f"run directory: {artifacts.out_dir}")
    print(f"metrics log:   {artifacts.metrics_path}")
    print(f"held-out view {cfg.test_view} accuracy: {artifacts.val_accuracy.overall:.4f}")
    if artifacts.teacher_train_fusion is not None:
        print(f"teacher train fused accuracy: {artifacts.teacher_train_fusion.fused:.4f}")
    return 0


def cmd_eval(args) -> int:
    student, preprocess, header = load_student_checkpoint(args.checkpoint)
    dataset = read_dataset(args.data)
    clips = [
        sample.clips[v]
        for sample in dataset.samples
        for v in sorted(sample.clips)
        if args.view is None or v == args.view
    ]
    if not clips:
        raise ValueError(f"no clips for view {args.view} in {args.data}")
    report = evaluate_accuracy(student, clips, preprocess)
    for view, acc in report.per_view.items():
        print(f"view {view}: accuracy {acc:.4f} over {report.counts[view]} clips")
    print(f"overall: {report.overall:.4f}")
    return 0


def cmd_matrix(args) -> int:
    exp = load_experiment_config(args.config)
    dataset = exp.load_dataset()
    out_dir = _resolve_out(exp.output_dir, args.out, "matrix")
    cfg = exp.train_config(dataset.n_classes, str(out_dir))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    _apply_serial(args.serial)
    k_folds = int(exp.matrix.get("k_folds", 5))
    modes = tuple(exp.matrix.get("modes", DEFAULT_MODES))
    views = exp.matrix.get("views")
    result = run_experiment_matrix(
        dataset, cfg, k_folds=k_folds, modes=modes, views=views, out_dir=out_dir
    )
    table = matrix_table("Held-out view accuracy, mean over folds (%)", result.aggregates)
    print(render_grid(table), end="")
    print(f"fold results: {out_dir / 'summary_folds.csv'}")
    print(f"aggregates:   {out_dir / 'summary.csv'}")
    return 0


def read_summary_csv(path: Path) -> list[MatrixAggregate]:
    import csv
    import io

    rows = list(csv.reader(io.StringIO(Path(path).read_text())))
    if not rows or rows[0] != ["view", "mode", "mean", "std"]:
        raise ValueError(
            f"{path} is not an aggregate summary CSV (expected header view,mode,mean,std)"
        )
    return [
        MatrixAggregate(view=int(r[0]), mode=r[1], mean=float(r[2]), std=float(r[3]))
        for r in rows[1:]
        if r
    ]


def cmd_report(args) -> int:
    aggregates = read_summary_csv(args.results)
    table = matrix_table(args.caption, aggregates)
    grid = render_grid(table)
    print(grid, end="")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.txt").write_text(grid)
        (args.out / "report.csv").write_text(render_csv(table))
        print(f"written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvkd",
        description="Multi-view knowledge distillation: data generation, training, "
        "cross-view evaluation, and report tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic multi-view dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--actors", type=int, default=10)
    p.add_argument("--clips", type=int, default=3)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--height", type=int, default=32)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--view-noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="run one cross-view training job")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpointed student on a dataset")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--view", type=int, default=None, help="restrict to one view")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("matrix", help="run the full (view x fold x mode) experiment grid")
    _add_common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("report", help="render an aggregate summary CSV as a table")
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--caption", default="Held-out view accuracy, mean over folds (%)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetFormatError, CheckpointFormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
