"""Functional AdamW: bias-corrected Adam moments plus decoupled weight decay."""
from __future__ import annotations

from dataclasses import dataclass, field

import torch


@dataclass(frozen=True)
class AdamWConfig:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ValueError("betas must lie in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


@dataclass
class AdamWState:
    step: int = 0
    exp_avg: dict[int, torch.Tensor] = field(default_factory=dict)
    exp_avg_sq: dict[int, torch.Tensor] = field(default_factory=dict)


def adamw_step(
    params: list[torch.Tensor],
    grads: list[torch.Tensor],
    state: AdamWState,
    cfg: AdamWConfig,
) -> None:
    """One in-place update: p <- p - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * p.

    The decay term uses the pre-update parameter value (decoupled decay).
    Missing gradients (None) are treated as zero.
    """
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} params but {len(grads)} grads")
    for p, g in zip(params, grads):
        if g is not None and g.shape != p.shape:
            raise ValueError(f"grad shape {tuple(g.shape)} != param shape {tuple(p.shape)}")
    state.step += 1
    t = state.step
    bias1 = 1.0 - cfg.beta1**t
    bias2 = 1.0 - cfg.beta2**t
    with torch.no_grad():
        for i, (p, g) in enumerate(zip(params, grads)):
            if i not in state.exp_avg:
                state.exp_avg[i] = torch.zeros_like(p)
                state.exp_avg_sq[i] = torch.zeros_like(p)
            m, v = state.exp_avg[i], state.exp_avg_sq[i]
            if g is None:
                g = torch.zeros_like(p)
            m.mul_(cfg.beta1).add_(g, alpha=1.0 - cfg.beta1)
            v.mul_(cfg.beta2).addcmul_(g, g, value=1.0 - cfg.beta2)
            decay = cfg.lr * cfg.weight_decay * p if cfg.weight_decay else None
            p.addcdiv_(m / bias1, (v / bias2).sqrt_().add_(cfg.eps), value=-cfg.lr)
            if decay is not None:
                p.sub_(decay)


class AdamW:
    """Minimal optimizer wrapper holding per-parameter moment state."""

    def __init__(self, parameters, cfg: AdamWConfig):
        self.params = list(parameters)
        self.cfg = cfg
        self.state = AdamWState()

    def step(self) -> None:
        grads = [p.grad for p in self.params]
        adamw_step(self.params, grads, self.state, self.cfg)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None
