"""Masked, EOS-weighted cross-entropy over pointer distributions.

Each supervised position contributes -log of the probability assigned to
its ground-truth candidate; positions beyond the feature's EOS are masked
out, the EOS position itself is up-weighted by alpha so sequence length is
learned despite being a single token, and the batch total is normalized by
the number of unmasked positions (not by the weighted count).
"""
from __future__ import annotations

import torch

CLAMP_EPS = 1e-7


class TrainingError(RuntimeError):
    pass


def masked_weighted_bce(predictions: torch.Tensor, targets: torch.Tensor,
                        mask: torch.Tensor, alpha: float) -> torch.Tensor:
    """predictions: (..., P, C) candidate probabilities, targets: (..., P)
    candidate indices, mask: (..., P) valid-position flags. Returns a
    scalar; differentiable w.r.t. predictions."""
    if alpha < 1.0:
        raise TrainingError(f"alpha {alpha} < 1")
    if predictions.shape[:-1] != targets.shape or targets.shape != mask.shape:
        raise TrainingError(
            f"shape mismatch: {tuple(predictions.shape)} vs "
            f"{tuple(targets.shape)} vs {tuple(mask.shape)}")
    lo = float(predictions.detach().min())
    hi = float(predictions.detach().max())
    if lo < -CLAMP_EPS or hi > 1.0 + CLAMP_EPS:
        raise TrainingError(f"probabilities outside [0,1]: min {lo} max {hi}")

    p = predictions.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)
    picked = p.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    nll = -torch.log(picked)
    m = mask.to(nll.dtype)
    weights = torch.where(targets == 0, torch.as_tensor(float(alpha), dtype=nll.dtype),
                          torch.as_tensor(1.0, dtype=nll.dtype))
    denom = m.sum()
    if denom.item() <= 0:
        raise TrainingError("mask selects no positions")
    return (nll * weights * m).sum() / denom
