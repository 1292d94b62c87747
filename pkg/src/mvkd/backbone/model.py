"""The full hierarchical video transformer classifier."""
from __future__ import annotations

from typing import NamedTuple

import torch
import torch.nn as nn

from .config import BackboneConfig
from .layers import PatchEmbed3D, PatchMerging, SwinBlock3D


class BackboneOutput(NamedTuple):
    feature: torch.Tensor  # [B, C_final], global average pooled tokens
    logits: torch.Tensor  # [B, n_classes]


class Backbone(nn.Module):
    def __init__(self, cfg: BackboneConfig):
        super().__init__()
        self.cfg = cfg
        self.patch_embed = PatchEmbed3D(cfg.patch_size, cfg.in_channels, cfg.embed_dim)
        self.stages = nn.ModuleList()
        self.mergings = nn.ModuleList()
        for s, stage in enumerate(cfg.stages):
            dim = cfg.stage_dim(s)
            blocks = nn.ModuleList(
                SwinBlock3D(
                    dim=dim,
                    heads=stage.heads,
                    window=cfg.window,
                    shifted=bool(i % 2),
                    mlp_ratio=cfg.mlp_ratio,
                    dropout=cfg.dropout,
                    drop_path=cfg.drop_path,
                )
                for i in range(stage.depth)
            )
            self.stages.append(blocks)
            if s < len(cfg.stages) - 1:
                self.mergings.append(PatchMerging(dim))
        self.head = nn.Linear(cfg.feature_dim, cfg.n_classes)
        self.apply(_init_weights)

    def forward(self, frames: torch.Tensor) -> BackboneOutput:
        if frames.ndim != 5 or frames.shape[-1] != self.cfg.in_channels:
            raise ValueError(
                f"expected frames [B, T, H, W, {self.cfg.in_channels}], got {tuple(frames.shape)}"
            )
        self.cfg.validate_geometry(tuple(frames.shape[1:4]))
        x = self.patch_embed(frames)
        for s, blocks in enumerate(self.stages):
            for block in blocks:
                x = block(x)
            if s < len(self.stages) - 1:
                x = self.mergings[s](x)
        feature = x.mean(dim=(1, 2, 3))
        return BackboneOutput(feature=feature, logits=self.head(feature))


def _init_weights(module: nn.Module) -> None:
    # trunc-normal(0.02) projections, zero biases, zero-init position bias
    # tables so untrained attention is purely content based.
    if isinstance(module, nn.Linear):
        nn.init.trunc_normal_(module.weight, std=0.02)
        if module.bias is not None:
            nn.init.zeros_(module.bias)
    elif isinstance(module, nn.LayerNorm):
        nn.init.ones_(module.weight)
        nn.init.zeros_(module.bias)
