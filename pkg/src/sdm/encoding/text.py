"""Text-condition embedding providers.

The local provider is a trainable lookup table over the fixed feature-type
vocabulary and is the default everywhere tests run; the remote provider
calls an external embedding service and stays behind configuration.
"""
from __future__ import annotations

import numpy as np
import torch
from torch import nn

from ..vocab import FEATURE_TYPES, UnknownFeatureType, canonical_feature_type
from .config import TEXT_DIM
from .types import TextEmbedding


class TextProviderError(Exception):
    pass


class LocalTextProvider(nn.Module):
    """Deterministic trainable table: one 256-dim row per canonical type."""

    def __init__(self, dim: int = TEXT_DIM):
        super().__init__()
        self.dim = dim
        self.table = nn.Embedding(len(FEATURE_TYPES), dim)
        self._index = {t: i for i, t in enumerate(FEATURE_TYPES)}

    def embed(self, text: str) -> torch.Tensor:
        canonical = canonical_feature_type(text)
        idx = torch.tensor(self._index[canonical], dtype=torch.long,
                           device=self.table.weight.device)
        return self.table(idx)

    forward = embed


class RemoteTextProvider:
    """Client for an external embedding endpoint (POST {base_url}/embed)."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def embed(self, text: str) -> torch.Tensor:
        import httpx

        if not text or not text.strip():
            raise UnknownFeatureType("empty feature type")
        try:
            resp = httpx.post(f"{self.base_url}/embed", json={"text": text},
                              timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise TextProviderError(f"embedding service unreachable: {exc}") from exc
        vec = payload.get("embedding")
        if not isinstance(vec, list) or len(vec) != TEXT_DIM:
            raise TextProviderError(
                f"embedding service returned {type(vec).__name__} "
                f"of length {len(vec) if isinstance(vec, list) else 'n/a'}")
        return torch.tensor(vec, dtype=torch.float32)


def embed_text(feature_type: str, provider) -> TextEmbedding:
    if not feature_type or not feature_type.strip():
        raise UnknownFeatureType("empty feature type")
    with torch.no_grad():
        vec = provider.embed(feature_type)
    arr = vec.detach().cpu().numpy().astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise TextProviderError("non-finite text embedding")
    return TextEmbedding(values=arr)
