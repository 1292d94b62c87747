from .evaluate import AccuracyReport, FusionReport, evaluate_accuracy, evaluate_teacher_fusion
from .gradcheck import GradcheckReport, gradcheck
from .loop import (
    RUN_MODES,
    RunArtifacts,
    TrainConfig,
    baseline_train_view,
    load_student_checkpoint,
    resolve_plan,
    train_config_from_dict,
    train_config_to_dict,
    train_run,
)
from .matrix import (
    DEFAULT_MODES,
    MatrixAggregate,
    MatrixResult,
    MatrixRow,
    aggregate_rows,
    run_experiment_matrix,
    write_fold_csv,
    write_summary_csv,
)
from .optim import AdamW, AdamWConfig, AdamWState, adamw_step

__all__ = [
    "AccuracyReport",
    "AdamW",
    "AdamWConfig",
    "AdamWState",
    "DEFAULT_MODES",
    "FusionReport",
    "GradcheckReport",
    "MatrixAggregate",
    "MatrixResult",
    "MatrixRow",
    "RUN_MODES",
    "RunArtifacts",
    "TrainConfig",
    "adamw_step",
    "aggregate_rows",
    "baseline_train_view",
    "evaluate_accuracy",
    "evaluate_teacher_fusion",
    "gradcheck",
    "load_student_checkpoint",
    "resolve_plan",
    "run_experiment_matrix",
    "train_config_from_dict",
    "train_config_to_dict",
    "train_run",
    "write_fold_csv",
    "write_summary_csv",
]
