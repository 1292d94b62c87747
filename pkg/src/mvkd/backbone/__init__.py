from .checkpoint import CheckpointFormatError, load_checkpoint, save_checkpoint
from .config import BackboneConfig, StageConfig, config_from_dict, config_to_dict
from .layers import Mlp, PatchEmbed3D, PatchMerging, SwinBlock3D, WindowAttention3D
from .model import Backbone, BackboneOutput
from .windows import (
    ATTN_MASK_PENALTY,
    cyclic_shift,
    inverse_cyclic_shift,
    mask_to_penalty,
    shifted_window_mask,
    window_partition,
    window_reverse,
)

__all__ = [
    "ATTN_MASK_PENALTY",
    "Backbone",
    "BackboneConfig",
    "BackboneOutput",
    "CheckpointFormatError",
    "Mlp",
    "PatchEmbed3D",
    "PatchMerging",
    "StageConfig",
    "SwinBlock3D",
    "WindowAttention3D",
    "config_from_dict",
    "config_to_dict",
    "cyclic_shift",
    "inverse_cyclic_shift",
    "load_checkpoint",
    "mask_to_penalty",
    "save_checkpoint",
    "shifted_window_mask",
    "window_partition",
    "window_reverse",
]
