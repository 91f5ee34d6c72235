"""Autoregressive face-ID generation with pointer attention.

The decoder stack is a standard pre-norm transformer decoder whose memory
is the single fused text-geometry row; its inputs are the face embeddings
of the ids emitted so far (seed face first). Each step scores the EOS
embedding (candidate 0) plus every face embedding, zeroes out already
emitted faces, and renormalizes. EOS is never masked, so the sequence
always terminates within N steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import torch
from torch import nn

from ..encoding.config import EncoderConfig
from ..geometry.mesh import MeshModel
from ..geometry.normalize import normalize_model
from ..vocab import canonical_feature_type
from .attention import AttentionWeights, fuse_batch, pointer_logits

EOS_ID = 0


class GenerationError(Exception):
    pass


@dataclass
class DecoderState:
    generated_ids: list[int]
    mask: np.ndarray            # (N+1,) bool, True = selectable
    step: int = 0

    @staticmethod
    def initial(seed_face_id: int, num_faces: int) -> "DecoderState":
        mask = np.ones(num_faces + 1, dtype=bool)
        mask[seed_face_id] = False
        return DecoderState(generated_ids=[seed_face_id], mask=mask, step=0)

    def advance(self, candidate: int) -> None:
        if candidate != EOS_ID:
            if not self.mask[candidate]:
                raise GenerationError(f"candidate {candidate} selected twice")
            self.mask[candidate] = False
            self.generated_ids.append(candidate)
        self.step += 1


@dataclass
class GenerationResult:
    face_ids: set[int]
    raw_sequence: list[int]
    per_step_distributions: Optional[list[np.ndarray]] = field(default=None)


class PointerGenerator(nn.Module):
    """Decoder stack plus fusion/pointer weights."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        self.weights = AttentionWeights(config)
        layer = nn.TransformerDecoderLayer(
            d_model=config.d_model,
            nhead=config.heads,
            dim_feedforward=config.feed_forward_dim,
            dropout=config.dropout,
            batch_first=True,
            norm_first=True,
        )
        self.decoder = nn.TransformerDecoder(layer, num_layers=config.encoder_layers)

    def hidden_states(self, inputs: torch.Tensor, memory: torch.Tensor,
                      input_pad: torch.Tensor | None = None) -> torch.Tensor:
        """Causal decoder pass; h at position t sees inputs [0..t] only."""
        L = inputs.shape[1]
        causal = nn.Transformer.generate_square_subsequent_mask(L, dtype=inputs.dtype)
        return self.decoder(inputs, memory, tgt_mask=causal,
                            tgt_key_padding_mask=input_pad)

    def candidate_matrix(self, e_f: torch.Tensor) -> torch.Tensor:
        """(N+1, d): EOS embedding at row 0, face embeddings at 1..N."""
        return torch.cat([self.weights.eos_embedding.view(1, -1), e_f], dim=0)


def masked_distribution(logits: torch.Tensor, mask: np.ndarray) -> torch.Tensor:
    """Softmax with masked candidates at exactly 0; EOS never masked."""
    assert mask[EOS_ID], "EOS must stay selectable"
    keep = torch.from_numpy(mask.copy())
    filled = logits.masked_fill(~keep, float("-inf"))
    return torch.softmax(filled, dim=-1)


def decode_step(state: DecoderState, e_fusion: torch.Tensor,
                candidates: torch.Tensor, generator: PointerGenerator,
                e_f: torch.Tensor) -> np.ndarray:
    """Probability vector over N+1 candidates for the next position."""
    ids = torch.tensor(state.generated_ids, dtype=torch.long)
    inputs = e_f[ids - 1].unsqueeze(0)          # ids are 1-based faces
    memory = e_fusion.view(1, 1, -1)
    h = generator.hidden_states(inputs, memory)[0, -1]
    logits = pointer_logits(candidates, h, generator.weights)
    probs = masked_distribution(logits, state.mask)
    return probs.detach().cpu().numpy()


def select_next(distribution: np.ndarray) -> int:
    """Highest probability wins; ties go to the lowest index."""
    return int(np.argmax(distribution))


def generate_feature_faces(model: MeshModel, seed_face_id: int, feature_type: str,
                           net, provider=None,
                           keep_distributions: bool = False) -> GenerationResult:
    """Full pipeline: text embed, encode, fuse, pointer-decode until EOS.

    ``net`` bundles encoder, generator and the default text provider. The
    model is normalized on a copy before encoding; the caller's instance is
    untouched.
    """
    from ..encoding.encoder import encode_model

    n = model.num_faces
    if not 1 <= seed_face_id <= n:
        raise GenerationError(f"seed face {seed_face_id} outside 1..{n}")
    canonical = canonical_feature_type(feature_type)
    provider = provider if provider is not None else net.text_provider

    was_training = net.training
    net.eval()
    try:
        with torch.no_grad():
            e_f = torch.tensor(
                encode_model(normalize_model(model), net.encoder).values,
                dtype=net.generator.weights.W_Q.dtype)
            e_s = net.text_provider.embed(canonical) if provider is net.text_provider \
                else provider.embed(canonical)
            e_s = e_s.to(e_f.dtype)
            e_fusion = fuse_batch(e_s.view(1, -1), e_f.unsqueeze(0), None,
                                  net.generator.weights)[0]
            candidates = net.generator.candidate_matrix(e_f)

            state = DecoderState.initial(seed_face_id, n)
            dists: list[np.ndarray] = []
            raw = [seed_face_id]
            while state.step < n:
                probs = decode_step(state, e_fusion, candidates, net.generator, e_f)
                if keep_distributions:
                    dists.append(probs)
                nxt = select_next(probs)
                state.advance(nxt)
                raw.append(nxt)
                if nxt == EOS_ID:
                    break
    finally:
        net.train(was_training)

    face_ids = {i for i in raw if i != EOS_ID}
    return GenerationResult(face_ids=face_ids, raw_sequence=raw,
                            per_step_distributions=dists if keep_distributions else None)
