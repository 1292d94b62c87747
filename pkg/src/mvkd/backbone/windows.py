"""Window tiling, cyclic shifts, and the shifted-window attention mask.

All functions take batched token grids of shape [B, T, H, W, C] and are pure.
"""
from __future__ import annotations

from functools import reduce
from operator import mul

import torch

# Additive penalty for masked attention pairs; exp(-1e4) underflows to zero,
# so masked pairs get strictly zero weight after softmax.
ATTN_MASK_PENALTY = -1.0e4


def _check_divisible(dims, window):
    for d, (g, w) in enumerate(zip(dims, window)):
        if g % w:
            raise ValueError(f"grid dims {tuple(dims)} not divisible by window {tuple(window)} along axis {d}")


def window_partition(x: torch.Tensor, window: tuple[int, int, int]) -> torch.Tensor:
    """[B, T, H, W, C] -> [B * nW, wt*wh*ww, C], windows tiled in (t, h, w) order."""
    b, t, h, w, c = x.shape
    _check_divisible((t, h, w), window)
    wt, wh, ww = window
    x = x.view(b, t // wt, wt, h // wh, wh, w // ww, ww, c)
    x = x.permute(0, 1, 3, 5, 2, 4, 6, 7).contiguous()
    return x.view(-1, reduce(mul, window), c)


def window_reverse(
    windows: torch.Tensor, window: tuple[int, int, int], grid_dims: tuple[int, int, int]
) -> torch.Tensor:
    """Exact inverse of :func:`window_partition` for the given grid dims."""
    t, h, w = grid_dims
    _check_divisible(grid_dims, window)
    wt, wh, ww = window
    n_windows = (t // wt) * (h // wh) * (w // ww)
    if windows.shape[0] % n_windows:
        raise ValueError(
            f"{windows.shape[0]} windows do not tile a {grid_dims} grid with window {window}"
        )
    b = windows.shape[0] // n_windows
    x = windows.view(b, t // wt, h // wh, w // ww, wt, wh, ww, -1)
    x = x.permute(0, 1, 4, 2, 5, 3, 6, 7).contiguous()
    return x.view(b, t, h, w, -1)


def cyclic_shift(x: torch.Tensor, shift: tuple[int, int, int]) -> torch.Tensor:
    """output[..., j, ...] = input[..., (j + shift) mod dim, ...] per grid axis."""
    return torch.roll(x, shifts=tuple(-s for s in shift), dims=(1, 2, 3))


def inverse_cyclic_shift(x: torch.Tensor, shift: tuple[int, int, int]) -> torch.Tensor:
    return torch.roll(x, shifts=tuple(shift), dims=(1, 2, 3))


def _axis_region_ids(dim: int, window: int, shift: int) -> torch.Tensor:
    """Region id of every post-shift position along one axis.

    Segments [0, dim-window), [dim-window, dim-shift), [dim-shift, dim) —
    positions in the last ``shift`` slots wrapped around during the cyclic
    shift and must not attend across the seam.
    """
    ids = torch.zeros(dim, dtype=torch.int64)
    if shift:
        ids[dim - window : dim - shift] = 1
        ids[dim - shift :] = 2
    return ids


def shifted_window_mask(
    grid_dims: tuple[int, int, int],
    window: tuple[int, int, int],
    shift: tuple[int, int, int],
) -> torch.Tensor:
    """Boolean [nW, N, N] mask for attention on a cyclically shifted grid.

    True marks pairs allowed to attend: those whose region ids agree along
    all three axes, i.e. pairs that were neighbours before the shift.
    """
    _check_divisible(grid_dims, window)
    for d, (s, w, g) in enumerate(zip(shift, window, grid_dims)):
        if not 0 <= s < w or w > g:
            raise ValueError(
                f"axis {d}: need 0 <= shift({s}) < window({w}) <= dim({g})"
            )
    t, h, w = grid_dims
    region = (
        _axis_region_ids(t, window[0], shift[0])[:, None, None] * 9
        + _axis_region_ids(h, window[1], shift[1])[None, :, None] * 3
        + _axis_region_ids(w, window[2], shift[2])[None, None, :]
    )
    region_windows = window_partition(region[None, ..., None].float(), window).squeeze(-1)
    return region_windows.unsqueeze(1) == region_windows.unsqueeze(2)


def mask_to_penalty(mask: torch.Tensor, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """Convert a boolean allow-mask into an additive pre-softmax penalty."""
    penalty = torch.zeros(mask.shape, dtype=dtype)
    return penalty.masked_fill(~mask, ATTN_MASK_PENALTY)
