"""Building blocks: patch embedding, windowed attention, transformer blocks,
and hierarchical patch merging."""
from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .windows import (
    cyclic_shift,
    inverse_cyclic_shift,
    mask_to_penalty,
    shifted_window_mask,
    window_partition,
    window_reverse,
)


class Mlp(nn.Module):
    def __init__(self, dim: int, hidden_dim: int, dropout: float = 0.0):
        super().__init__()
        self.fc1 = nn.Linear(dim, hidden_dim)
        self.act = nn.GELU()
        self.fc2 = nn.Linear(hidden_dim, dim)
        self.drop = nn.Dropout(dropout)

    def forward(self, x):
        x = self.drop(self.act(self.fc1(x)))
        return self.drop(self.fc2(x))


class DropPath(nn.Module):
    """Per-sample residual branch dropout (stochastic depth)."""

    def __init__(self, drop_prob: float = 0.0):
        super().__init__()
        self.drop_prob = drop_prob

    def forward(self, x):
        if self.drop_prob == 0.0 or not self.training:
            return x
        keep = 1.0 - self.drop_prob
        shape = (x.shape[0],) + (1,) * (x.ndim - 1)
        gate = torch.rand(shape, dtype=x.dtype, device=x.device).add_(keep).floor_()
        return x / keep * gate


class PatchEmbed3D(nn.Module):
    """Linear projection of non-overlapping 3D patches, then layer norm."""

    def __init__(self, patch_size: tuple[int, int, int], in_channels: int, embed_dim: int):
        super().__init__()
        self.patch_size = tuple(patch_size)
        self.in_channels = in_channels
        pt, ph, pw = self.patch_size
        self.proj = nn.Linear(pt * ph * pw * in_channels, embed_dim)
        self.norm = nn.LayerNorm(embed_dim)

    def extract_patches(self, frames: torch.Tensor) -> torch.Tensor:
        """[B, T, H, W, C_in] -> [B, T', H', W', pt*ph*pw*C_in].

        Patch vectors raster their voxels in (t, h, w, channel) order.
        """
        b, t, h, w, c = frames.shape
        pt, ph, pw = self.patch_size
        if t % pt or h % ph or w % pw:
            raise ValueError(
                f"frame geometry {(t, h, w)} not divisible by patch size {self.patch_size}"
            )
        x = frames.view(b, t // pt, pt, h // ph, ph, w // pw, pw, c)
        x = x.permute(0, 1, 3, 5, 2, 4, 6, 7).contiguous()
        return x.view(b, t // pt, h // ph, w // pw, pt * ph * pw * c)

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        return self.norm(self.proj(self.extract_patches(frames)))


class WindowAttention3D(nn.Module):
    """Multi-head scaled dot-product attention inside one 3D window, with a
    learned relative position bias per head."""

    def __init__(self, dim: int, window: tuple[int, int, int], heads: int,
                 dropout: float = 0.0):
        super().__init__()
        if dim % heads:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.dim = dim
        self.window = tuple(window)
        self.heads = heads
        self.scale = (dim // heads) ** -0.5

        wt, wh, ww = self.window
        self.relative_position_bias_table = nn.Parameter(
            torch.zeros((2 * wt - 1) * (2 * wh - 1) * (2 * ww - 1), heads)
        )
        coords = torch.stack(
            torch.meshgrid(
                torch.arange(wt), torch.arange(wh), torch.arange(ww), indexing="ij"
            )
        ).flatten(1)
        rel = coords[:, :, None] - coords[:, None, :]
        rel = rel.permute(1, 2, 0).contiguous()
        rel[:, :, 0] += wt - 1
        rel[:, :, 1] += wh - 1
        rel[:, :, 2] += ww - 1
        rel[:, :, 0] *= (2 * wh - 1) * (2 * ww - 1)
        rel[:, :, 1] *= 2 * ww - 1
        self.register_buffer("relative_position_index", rel.sum(-1), persistent=False)

        self.qkv = nn.Linear(dim, dim * 3)
        self.proj = nn.Linear(dim, dim)
        self.attn_drop = nn.Dropout(dropout)
        self.proj_drop = nn.Dropout(dropout)

    def relative_position_bias(self) -> torch.Tensor:
        n = self.relative_position_index.numel()
        size = self.window[0] * self.window[1] * self.window[2]
        bias = self.relative_position_bias_table[
            self.relative_position_index.view(-1)
        ].view(size, size, self.heads)
        return bias.permute(2, 0, 1).contiguous()

    def forward(self, windows: torch.Tensor, mask: torch.Tensor | None = None) -> torch.Tensor:
        """windows: [B_, N, C]; mask: boolean [nW, N, N] with True = allowed."""
        b_, n, c = windows.shape
        qkv = (
            self.qkv(windows)
            .view(b_, n, 3, self.heads, c // self.heads)
            .permute(2, 0, 3, 1, 4)
        )
        q, k, v = qkv[0], qkv[1], qkv[2]
        attn = (q * self.scale) @ k.transpose(-2, -1)
        attn = attn + self.relative_position_bias().unsqueeze(0)
        if mask is not None:
            n_windows = mask.shape[0]
            penalty = mask_to_penalty(mask.to(windows.device), dtype=attn.dtype)
            attn = attn.view(b_ // n_windows, n_windows, self.heads, n, n)
            attn = attn + penalty.unsqueeze(0).unsqueeze(2)
            attn = attn.view(b_, self.heads, n, n)
        attn = self.attn_drop(F.softmax(attn, dim=-1))
        out = (attn @ v).transpose(1, 2).reshape(b_, n, c)
        return self.proj_drop(self.proj(out))


class SwinBlock3D(nn.Module):
    """Pre-norm residual block: (shifted) window attention, then an MLP.

    Shifted blocks cyclically rotate the grid by half a window, mask the
    wrapped-together pairs, and rotate back.
    """

    def __init__(self, dim: int, heads: int, window: tuple[int, int, int],
                 shifted: bool, mlp_ratio: float = 4.0, dropout: float = 0.0,
                 drop_path: float = 0.0):
        super().__init__()
        self.window = tuple(window)
        self.shift = tuple(w // 2 for w in window) if shifted else (0, 0, 0)
        self.shifted = shifted
        self.norm1 = nn.LayerNorm(dim)
        self.attn = WindowAttention3D(dim, window, heads, dropout=dropout)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = Mlp(dim, int(dim * mlp_ratio), dropout=dropout)
        self.drop_path = DropPath(drop_path) if drop_path > 0 else nn.Identity()

    def _attention(self, x: torch.Tensor) -> torch.Tensor:
        grid_dims = tuple(x.shape[1:4])
        y = self.norm1(x)
        if self.shifted and any(self.shift):
            y = cyclic_shift(y, self.shift)
            mask = shifted_window_mask(grid_dims, self.window, self.shift)
        else:
            mask = None
        windows = window_partition(y, self.window)
        windows = self.attn(windows, mask=mask)
        y = window_reverse(windows, self.window, grid_dims)
        if self.shifted and any(self.shift):
            y = inverse_cyclic_shift(y, self.shift)
        return y

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.drop_path(self._attention(x))
        return x + self.drop_path(self.mlp(self.norm2(x)))


class PatchMerging(nn.Module):
    """Concatenate 2x2 spatial neighbourhoods, layer-normalize, project to 2C."""

    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim
        self.norm = nn.LayerNorm(4 * dim)
        self.reduction = nn.Linear(4 * dim, 2 * dim, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, h, w, c = x.shape
        if h % 2 or w % 2:
            raise ValueError(f"spatial dims must be even for merging, got {(h, w)}")
        x = torch.cat(
            [x[:, :, 0::2, 0::2], x[:, :, 1::2, 0::2], x[:, :, 0::2, 1::2], x[:, :, 1::2, 1::2]],
            dim=-1,
        )
        return self.reduction(self.norm(x))
