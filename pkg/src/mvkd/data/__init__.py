from .preprocess import (
    PreprocessConfig,
    denormalize_frames,
    normalize_frames,
    preprocess_clip,
    sample_frame_indices,
    sample_frames,
)
from .splits import SplitPlan, make_cross_view_split, make_split_plans, stratified_actor_folds
from .storage import DatasetFormatError, read_clip, read_dataset, write_clip, write_dataset
from .synthetic import SynthConfig, generate_clip, generate_synthetic_dataset
from .types import Dataset, MultiViewSample, VideoClip

__all__ = [
    "Dataset",
    "DatasetFormatError",
    "MultiViewSample",
    "PreprocessConfig",
    "SplitPlan",
    "SynthConfig",
    "VideoClip",
    "denormalize_frames",
    "generate_clip",
    "generate_synthetic_dataset",
    "make_cross_view_split",
    "make_split_plans",
    "normalize_frames",
    "preprocess_clip",
    "read_clip",
    "read_dataset",
    "sample_frame_indices",
    "sample_frames",
    "stratified_actor_folds",
    "write_clip",
    "write_dataset",
]
