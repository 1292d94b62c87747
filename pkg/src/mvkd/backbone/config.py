"""Backbone hyperparameters and geometry validation."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class StageConfig:
    depth: int
    heads: int


@dataclass(frozen=True)
class BackboneConfig:
    """Hierarchical shifted-window video transformer, toy scale by default.

    Spatial resolution halves and channel width doubles after every stage
    except the last; the temporal extent is never downsampled.
    """

    patch_size: tuple[int, int, int] = (2, 4, 4)
    embed_dim: int = 24
    stages: tuple[StageConfig, ...] = (StageConfig(2, 3), StageConfig(2, 6))
    window: tuple[int, int, int] = (2, 4, 4)
    mlp_ratio: float = 4.0
    n_classes: int = 4
    dropout: float = 0.0
    drop_path: float = 0.0
    in_channels: int = 3

    def __post_init__(self):
        if any(p < 1 for p in self.patch_size):
            raise ValueError(f"patch_size entries must be >= 1, got {self.patch_size}")
        if any(w < 1 for w in self.window):
            raise ValueError(f"window entries must be >= 1, got {self.window}")
        if self.embed_dim < 1:
            raise ValueError("embed_dim must be >= 1")
        if not self.stages:
            raise ValueError("at least one stage is required")
        for s, stage in enumerate(self.stages):
            if stage.depth < 2 or stage.depth % 2:
                raise ValueError(
                    f"stage {s} depth must be a positive even number, got {stage.depth}"
                )
            dim = self.stage_dim(s)
            if dim % stage.heads:
                raise ValueError(
                    f"stage {s} width {dim} is not divisible by heads={stage.heads}"
                )
        if self.mlp_ratio <= 0:
            raise ValueError("mlp_ratio must be positive")
        if not 0.0 <= self.dropout < 1.0 or not 0.0 <= self.drop_path < 1.0:
            raise ValueError("dropout and drop_path must lie in [0, 1)")
        if self.n_classes < 1:
            raise ValueError("n_classes must be >= 1")

    @property
    def shift(self) -> tuple[int, int, int]:
        return tuple(w // 2 for w in self.window)

    def stage_dim(self, stage_index: int) -> int:
        return self.embed_dim * 2**stage_index

    @property
    def feature_dim(self) -> int:
        return self.stage_dim(len(self.stages) - 1)

    def token_grid(self, frames_shape: tuple[int, int, int]) -> tuple[int, int, int]:
        """Token grid dims after patch embedding, validating divisibility."""
        t, h, w = frames_shape
        pt, ph, pw = self.patch_size
        if t % pt or h % ph or w % pw:
            raise ValueError(
                f"input geometry {frames_shape} is not divisible by patch size {self.patch_size}"
            )
        return t // pt, h // ph, w // pw

    def validate_geometry(self, frames_shape: tuple[int, int, int]) -> None:
        """Check the whole patch -> window -> merging divisibility chain."""
        grid = self.token_grid(frames_shape)
        for s in range(len(self.stages)):
            for d, (g, w) in enumerate(zip(grid, self.window)):
                if g % w:
                    raise ValueError(
                        f"stage {s} token grid {grid} is not divisible by window "
                        f"{self.window} along axis {d}"
                    )
            if s < len(self.stages) - 1:
                if grid[1] % 2 or grid[2] % 2:
                    raise ValueError(
                        f"stage {s} token grid {grid} needs even spatial dims for merging"
                    )
                grid = (grid[0], grid[1] // 2, grid[2] // 2)


def config_to_dict(cfg: BackboneConfig) -> dict:
    return {
        "patch_size": list(cfg.patch_size),
        "embed_dim": cfg.embed_dim,
        "stages": [{"depth": s.depth, "heads": s.heads} for s in cfg.stages],
        "window": list(cfg.window),
        "mlp_ratio": cfg.mlp_ratio,
        "n_classes": cfg.n_classes,
        "dropout": cfg.dropout,
        "drop_path": cfg.drop_path,
        "in_channels": cfg.in_channels,
    }


def config_from_dict(data: dict) -> BackboneConfig:
    return BackboneConfig(
        patch_size=tuple(data["patch_size"]),
        embed_dim=int(data["embed_dim"]),
        stages=tuple(StageConfig(int(s["depth"]), int(s["heads"])) for s in data["stages"]),
        window=tuple(data["window"]),
        mlp_ratio=float(data["mlp_ratio"]),
        n_classes=int(data["n_classes"]),
        dropout=float(data.get("dropout", 0.0)),
        drop_path=float(data.get("drop_path", 0.0)),
        in_channels=int(data.get("in_channels", 3)),
    )
