"""Naive reference implementations for verifying the fast loss path.

Everything here is deliberately written as plain term-by-term evaluation,
independent of the vectorized code in loss.py: the reference loss walks the
objective one anchor at a time with scalar math, and the gradient check uses
central finite differences of whichever loss function it is handed.
"""
from __future__ import annotations

import math

import numpy as np

from .loss import OclConfig, ocl_grad, ocl_loss


def reference_loss(f_a, f_b, batch_extras=None, cfg: OclConfig = OclConfig()) -> float:
    """Direct evaluation of the symmetric objective, one log term at a time."""
    a = [np.asarray(v, dtype=np.float64) for v in np.asarray(f_a, dtype=np.float64)]
    b = [np.asarray(v, dtype=np.float64) for v in np.asarray(f_b, dtype=np.float64)]
    extras = [] if batch_extras is None else [
        np.asarray(v, dtype=np.float64) for v in np.asarray(batch_extras, dtype=np.float64)
    ]
    n = len(a)
    tau = cfg.tau

    # Every feature in the batch, tagged so an anchor can skip itself.
    bank = [("a", i, v) for i, v in enumerate(a)]
    bank += [("b", i, v) for i, v in enumerate(b)]
    bank += [("x", i, v) for i, v in enumerate(extras)]

    def term(role: str, index: int, anchor: np.ndarray, positive: np.ndarray) -> float:
        denom = 0.0
        for other_role, other_index, vec in bank:
            if cfg.exclude_self and other_role == role and other_index == index:
                continue
            denom += math.exp(float(np.dot(anchor, vec)) / tau)
        return -math.log(math.exp(float(np.dot(anchor, positive)) / tau) / denom)

    total = 0.0
    for i in range(n):
        total += term("a", i, a[i], b[i]) / n
    for i in range(n):
        total += term("b", i, b[i], a[i]) / n
    return total


def finite_difference_grad(loss_fn, f_a, f_b, batch_extras=None, cfg: OclConfig = OclConfig(), h: float = 1e-4):
    """Central-difference gradient of loss_fn with respect to every coordinate."""
    blocks = [np.array(f_a, dtype=np.float64), np.array(f_b, dtype=np.float64)]
    blocks.append(
        np.zeros((0, blocks[0].shape[1]))
        if batch_extras is None
        else np.array(batch_extras, dtype=np.float64)
    )
    grads = []
    for which in range(3):
        g = np.zeros_like(blocks[which])
        for flat in range(blocks[which].size):
            original = blocks[which].flat[flat]
            blocks[which].flat[flat] = original + h
            up = loss_fn(blocks[0], blocks[1], blocks[2], cfg)
            blocks[which].flat[flat] = original - h
            down = loss_fn(blocks[0], blocks[1], blocks[2], cfg)
            blocks[which].flat[flat] = original
            g.flat[flat] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads[0], grads[1], grads[2]


def gradient_check(f_a, f_b, batch_extras=None, cfg: OclConfig = OclConfig(), h: float = 1e-4) -> float:
    """Max deviation of the analytic gradient from central differences.

    Scaled by the largest finite-difference magnitude so the number reads as
    a relative error.
    """
    analytic = ocl_grad(f_a, f_b, batch_extras, cfg)
    numeric = finite_difference_grad(ocl_loss, f_a, f_b, batch_extras, cfg, h=h)
    worst = 0.0
    scale = max(float(np.max(np.abs(g))) if g.size else 0.0 for g in numeric)
    scale = max(scale, 1e-12)
    for g_a, g_n in zip(analytic, numeric):
        if g_a.size:
            worst = max(worst, float(np.max(np.abs(g_a - g_n))))
    return worst / scale
