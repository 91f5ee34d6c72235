"""Text-geometry cross attention and pointer scoring weights.

The fusion step uses the text embedding as a single query over the face
embeddings, multi-head, with no output projection: heads are column blocks
of W_Q/W_K/W_V and their outputs concatenate back to d_model. The pointer
head is single-head: candidate j scores v . tanh(c_j W1 + h W2), with the
learned EOS embedding sitting at candidate index 0.
"""
from __future__ import annotations

import math

import numpy as np
import torch
from torch import nn

from ..encoding.config import EncoderConfig
from ..encoding.types import GeometricEmbedding, TextEmbedding


class AttentionWeights(nn.Module):
    def __init__(self, config: EncoderConfig):
        super().__init__()
        d = config.d_model
        self.heads = config.heads
        self.d_k = d // config.heads
        # text embeddings are fixed at 256; adapt when d_model diverges
        self.text_adapter = (nn.Linear(config.text_dim, d, bias=False)
                             if config.text_dim != d else None)
        self.W_Q = nn.Parameter(torch.empty(d, d))
        self.W_K = nn.Parameter(torch.empty(d, d))
        self.W_V = nn.Parameter(torch.empty(d, d))
        self.W1 = nn.Parameter(torch.empty(d, d))
        self.W2 = nn.Parameter(torch.empty(d, d))
        self.v = nn.Parameter(torch.empty(d))
        self.eos_embedding = nn.Parameter(torch.zeros(d))
        for w in (self.W_Q, self.W_K, self.W_V, self.W1, self.W2):
            nn.init.xavier_uniform_(w)
        nn.init.normal_(self.v, std=1.0 / math.sqrt(d))
        # unit scale so the EOS candidate starts comparable to the
        # layer-normalized face embeddings it competes with
        nn.init.normal_(self.eos_embedding, std=1.0)

    def project_text(self, e_s: torch.Tensor) -> torch.Tensor:
        return e_s if self.text_adapter is None else self.text_adapter(e_s)


def fuse_batch(e_s: torch.Tensor, e_f: torch.Tensor, pad: torch.Tensor | None,
               w: AttentionWeights) -> torch.Tensor:
    """softmax((E_S W_Q)(E_F W_K)^T / sqrt(D_k)) (E_F W_V), per head.

    e_s: (B, d) one query row per model; e_f: (B, N, d); pad True = ignore.
    Returns (B, d).
    """
    B, N, d = e_f.shape
    H, dk = w.heads, w.d_k
    q = (w.project_text(e_s) @ w.W_Q).view(B, H, dk)
    k = (e_f @ w.W_K).view(B, N, H, dk).permute(0, 2, 1, 3)
    v = (e_f @ w.W_V).view(B, N, H, dk).permute(0, 2, 1, 3)
    scores = (k @ q.unsqueeze(-1)).squeeze(-1) / math.sqrt(dk)    # (B, H, N)
    if pad is not None:
        scores = scores.masked_fill(pad.unsqueeze(1), float("-inf"))
    attn = torch.softmax(scores, dim=-1)
    out = (attn.unsqueeze(-2) @ v).squeeze(-2)                    # (B, H, dk)
    return out.reshape(B, d)


def fusion_attention_rows(e_s: torch.Tensor, e_f: torch.Tensor,
                          w: AttentionWeights) -> torch.Tensor:
    """Per-head attention distributions over faces, (H, N); rows sum to 1."""
    out = []
    N, d = e_f.shape
    H, dk = w.heads, w.d_k
    q = (w.project_text(e_s.view(1, -1)) @ w.W_Q).view(H, dk)
    k = (e_f @ w.W_K).view(N, H, dk)
    for h in range(H):
        s = (k[:, h, :] @ q[h]) / math.sqrt(dk)
        out.append(torch.softmax(s, dim=0))
    return torch.stack(out)


def cross_attention_fuse(e_s: TextEmbedding, e_f: GeometricEmbedding,
                         w: AttentionWeights) -> np.ndarray:
    """Single-model convenience wrapper over numpy embeddings."""
    dtype = w.W_Q.dtype
    es = torch.tensor(np.asarray(e_s.values), dtype=dtype).view(1, -1)
    ef = torch.tensor(np.asarray(e_f.values), dtype=dtype).unsqueeze(0)
    expected = w.text_adapter.in_features if w.text_adapter is not None else ef.shape[2]
    if es.shape[1] != expected:
        raise ValueError(
            f"text dim {es.shape[1]} does not match expected {expected}")
    with torch.no_grad():
        fused = fuse_batch(es, ef, None, w)
    return fused[0].cpu().numpy()


def pointer_logits(candidates: torch.Tensor, hidden: torch.Tensor,
                   w: AttentionWeights) -> torch.Tensor:
    """v . tanh(c_j W1 + h W2) for every candidate j.

    candidates: (..., N+1, d); hidden: (..., d). Returns (..., N+1).
    """
    u = torch.tanh(candidates @ w.W1 + (hidden @ w.W2).unsqueeze(-2))
    return u @ w.v
