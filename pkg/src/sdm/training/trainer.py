"""Teacher-forced training loop for the pointer network.

One training sample is (model, labeled feature). A batch encodes its
distinct models once, fuses each sample's feature-type embedding with the
face embeddings, runs the causal decoder over the full label sequence in
one pass, and applies the masked EOS-weighted loss. Runs are deterministic
for a fixed seed on a single thread.
"""
from __future__ import annotations

import copy
import logging
import random
from dataclasses import dataclass
from typing import Optional

import torch

from ..checkpoint import save_checkpoint
from ..encoding.batching import pack_models
from ..generation.attention import fuse_batch, pointer_logits
from ..geometry.mesh import MeshModel
from ..geometry.normalize import normalize_model
from ..net import SdmNet
from ..tokens import tokenize_model
from .labels import build_labels
from .loss import TrainingError, masked_weighted_bce
from .metrics import MetricsReport, evaluate

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    batch_size: int = 16
    epochs: int = 200
    learning_rate: float = 1e-4
    eos_weight: float = 5.0
    seed: int = 0
    label_length: Optional[int] = None   # None: max feature size + 2
    patience: int = 10
    target_em: Optional[float] = None    # stop early once reached (sanity runs)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size {self.batch_size} < 1")
        if self.eos_weight < 1.0:
            raise ValueError(f"eos_weight {self.eos_weight} < 1")

    def to_dict(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "eos_weight": self.eos_weight,
            "seed": self.seed,
            "label_length": self.label_length,
            "patience": self.patience,
            "target_em": self.target_em,
        }

    @staticmethod
    def from_dict(d: dict) -> "TrainConfig":
        return TrainConfig(**d)


def label_length_for(models: list[MeshModel]) -> int:
    sizes = [len(lab.face_ids) for m in models for lab in m.feature_labels]
    if not sizes:
        raise TrainingError("no labeled features in dataset")
    return max(sizes) + 2


def batch_loss(net: SdmNet, models: list[MeshModel], chunk: list[tuple[int, int]],
               length: int, alpha: float, rng,
               token_cache: dict | None = None) -> torch.Tensor:
    """Loss for samples [(model index, label index)] in one forward pass."""
    midxs = sorted({mi for mi, _ in chunk})
    local = {mi: k for k, mi in enumerate(midxs)}
    packed = pack_models([models[mi] for mi in midxs], token_cache=token_cache)
    ef_all, pad_all = net.encoder(packed)          # (Bm, Nmax, d)

    rows = torch.tensor([local[mi] for mi, _ in chunk], dtype=torch.long)
    e_f = ef_all[rows]                             # (Bs, Nmax, d)
    pads = pad_all[rows]                           # (Bs, Nmax) True = pad
    bs, _, d = e_f.shape

    toks, vlens, e_s_rows = [], [], []
    for mi, li in chunk:
        m = models[mi]
        lab = m.feature_labels[li]
        seq = build_labels(m, lab.face_ids, rng, length, lab.feature_type)
        toks.append(seq.tokens)
        vlens.append(seq.valid_length)
        e_s_rows.append(net.text_provider.embed(lab.feature_type))
    tok = torch.tensor(toks, dtype=torch.long)     # (Bs, L)
    e_s = torch.stack(e_s_rows).to(e_f.dtype)

    w = net.generator.weights
    fused = fuse_batch(e_s, e_f, pads, w)          # (Bs, d)

    inp_tok = tok[:, :-1]
    gather = (inp_tok - 1).clamp(min=0).unsqueeze(-1).expand(-1, -1, d)
    inputs = e_f.gather(1, gather) * (inp_tok > 0).unsqueeze(-1).to(e_f.dtype)
    hidden = net.generator.hidden_states(inputs, fused.unsqueeze(1))

    cands = torch.cat([w.eos_embedding.view(1, 1, -1).expand(bs, 1, d), e_f], dim=1)
    logits = pointer_logits(cands.unsqueeze(1), hidden, w)   # (Bs, L-1, N+1)
    cand_pad = torch.cat([torch.zeros(bs, 1, dtype=torch.bool), pads], dim=1)
    logits = logits.masked_fill(cand_pad.unsqueeze(1), float("-inf"))
    probs = torch.softmax(logits, dim=-1)

    targets = tok[:, 1:]
    mask = torch.arange(length - 1).unsqueeze(0) < torch.tensor(vlens).unsqueeze(1)
    return masked_weighted_bce(probs, targets, mask, alpha)


def train(train_models: list[MeshModel], val_models: list[MeshModel],
          train_config: TrainConfig, encoder_config=None,
          checkpoint_path=None, net: Optional[SdmNet] = None):
    """Returns (net at its best validation epoch, MetricsReport).

    With an empty validation list the plateau metric falls back to the
    training split (memorization sanity runs). When both splits are given
    they must not share models.
    """
    from ..encoding.config import EncoderConfig

    if not train_models:
        raise TrainingError("empty training set")
    if val_models:
        overlap = {m.model_id for m in train_models} & {m.model_id for m in val_models}
        if overlap:
            raise TrainingError(f"train/val share models: {sorted(overlap)[:5]}")

    torch.set_num_threads(1)
    torch.manual_seed(train_config.seed)
    encoder_config = encoder_config or EncoderConfig()
    if net is None:
        net = SdmNet(encoder_config)

    opt = torch.optim.Adam(net.parameters(), lr=train_config.learning_rate)
    norm_train = [normalize_model(m) for m in train_models]
    cache = {m.model_id: tokenize_model(m) for m in norm_train}
    length = train_config.label_length or label_length_for(train_models)
    metric_split = val_models if val_models else train_models

    samples = [(mi, li) for mi, m in enumerate(norm_train)
               for li in range(len(m.feature_labels))]
    if not samples:
        raise TrainingError("no labeled features in training set")
    rng = random.Random(train_config.seed)

    loss_curve: list[float] = []
    history: list[dict] = []
    best_state = None
    best_iou = -1.0
    best_epoch = -1
    stale = 0

    for epoch in range(train_config.epochs):
        net.train()
        rng.shuffle(samples)
        total = 0.0
        steps = 0
        for start in range(0, len(samples), train_config.batch_size):
            chunk = samples[start:start + train_config.batch_size]
            loss = batch_loss(net, norm_train, chunk, length,
                              train_config.eos_weight, rng, cache)
            if not torch.isfinite(loss):
                raise TrainingError(
                    f"loss diverged at epoch {epoch} step {steps}: {loss.item()}")
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += loss.item()
            steps += 1
        loss_curve.append(total / steps)

        report = evaluate(net, metric_split)
        history.append({"epoch": epoch, "train_loss": loss_curve[-1],
                        "iou": report.iou_mean, "em": report.em_rate})
        log.info("epoch %d loss %.5f iou %.4f em %.4f",
                 epoch, loss_curve[-1], report.iou_mean, report.em_rate)

        if report.iou_mean > best_iou + 1e-9:
            best_iou = report.iou_mean
            best_epoch = epoch
            best_state = copy.deepcopy(net.state_dict())
            stale = 0
        else:
            stale += 1
            if stale >= train_config.patience:
                log.info("stopping: no IoU improvement for %d epochs", stale)
                break
        if train_config.target_em is not None and report.em_rate >= train_config.target_em:
            log.info("stopping: em %.4f reached target", report.em_rate)
            break

    if best_state is not None:
        net.load_state_dict(best_state)
    final = evaluate(net, metric_split)
    final.loss_curve = loss_curve
    if checkpoint_path is not None:
        save_checkpoint(checkpoint_path, net, encoder_config,
                        extra={"train_config": train_config.to_dict(),
                               "best_epoch": best_epoch,
                               "history": history,
                               "metrics": final.to_dict()})
    return net, final
