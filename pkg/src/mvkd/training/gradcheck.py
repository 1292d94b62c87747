"""Finite-difference verification of analytic gradients.

Probes random scalar parameters, compares autograd against central
differences of the re-evaluated loss, and reports the worst relative error.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import torch


@dataclass(frozen=True)
class GradcheckReport:
    max_rel_err: float
    n_probes: int
    worst_param: str | None = None
    worst_index: int | None = None


def gradcheck(
    loss_fn: Callable[[], torch.Tensor],
    named_params: Sequence[tuple[str, torch.Tensor]],
    probe_count: int,
    step: float = 1e-3,
    seed: int = 0,
    denom_floor: float = 1e-8,
) -> GradcheckReport:
    """``loss_fn`` must be a deterministic closure over ``named_params``.

    Parameters are perturbed in place and restored; run models in double
    precision for meaningful tolerances.
    """
    if probe_count < 0:
        raise ValueError(f"probe_count must be >= 0, got {probe_count}")
    if probe_count == 0:
        return GradcheckReport(max_rel_err=0.0, n_probes=0)
    named_params = list(named_params)
    params = [p for _, p in named_params]
    loss = loss_fn()
    analytic = torch.autograd.grad(loss, params, allow_unused=True)

    sizes = np.array([p.numel() for p in params])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rng = np.random.default_rng(seed)
    flat_choices = rng.integers(0, total, size=probe_count)

    worst = GradcheckReport(max_rel_err=0.0, n_probes=probe_count)
    for flat in flat_choices:
        param_idx = int(np.searchsorted(offsets, flat, side="right") - 1)
        inner = int(flat - offsets[param_idx])
        name, p = named_params[param_idx]
        grad = analytic[param_idx]
        a = 0.0 if grad is None else float(grad.view(-1)[inner])
        with torch.no_grad():
            flat_p = p.view(-1)
            orig = float(flat_p[inner])
            flat_p[inner] = orig + step
            loss_plus = float(loss_fn())
            flat_p[inner] = orig - step
            loss_minus = float(loss_fn())
            flat_p[inner] = orig
        numeric = (loss_plus - loss_minus) / (2.0 * step)
        rel = abs(a - numeric) / max(abs(a), abs(numeric), denom_floor)
        if rel > worst.max_rel_err:
            worst = GradcheckReport(
                max_rel_err=rel, n_probes=probe_count, worst_param=name, worst_index=inner
            )
    return worst
