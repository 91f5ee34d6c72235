"""Label sequences for teacher-forced pointer training.

A feature with face set Y of size M becomes the fixed-length sequence
[SOS, remaining members ascending, EOS, 0, ...]: the start token is one
member of Y (drawn at random during training), the other M-1 members
follow in ascending face-id order, then EOS (0) and zero padding. The
supervised targets are the tokens shifted left by one, so exactly M
positions carry loss: M-1 face emissions plus the EOS step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import torch

from ..geometry.mesh import MeshModel

EOS_TOKEN = 0


class LabelError(ValueError):
    pass


@dataclass
class LabelSequence:
    tokens: list[int]       # length L: [SOS, y..., EOS, 0, ...]
    valid_length: int       # supervised positions through EOS == |feature|
    feature_type: str = ""

    def __post_init__(self):
        if self.tokens[0] == EOS_TOKEN:
            raise LabelError("sequence must start with a face id")


def build_labels(model: MeshModel, face_ids: Iterable[int], rng,
                 length: int, feature_type: str = "") -> LabelSequence:
    """Expand one labeled feature into its padded token sequence."""
    members = sorted(set(int(i) for i in face_ids))
    if not members:
        raise LabelError("empty feature set")
    n = model.num_faces
    bad = [i for i in members if not 1 <= i <= n]
    if bad:
        raise LabelError(f"face ids {bad} outside 1..{n}")
    if len(members) + 1 > length:
        raise LabelError(
            f"feature of {len(members)} faces does not fit length {length}")
    sos = members[rng.randrange(len(members))]
    rest = [i for i in members if i != sos]
    tokens = [sos] + rest + [EOS_TOKEN]
    tokens += [0] * (length - len(tokens))
    return LabelSequence(tokens=tokens, valid_length=len(members),
                         feature_type=feature_type)


def teacher_forcing_inputs(labels: LabelSequence, e_fusion: torch.Tensor,
                           e_f: torch.Tensor) -> torch.Tensor:
    """Decoder input rows for one sample: face embeddings of the tokens
    [SOS, y1..], zero rows at EOS/padding slots. Shape (L-1, d)."""
    if e_fusion.shape[-1] != e_f.shape[-1]:
        raise LabelError(
            f"fusion dim {e_fusion.shape[-1]} != face dim {e_f.shape[-1]}")
    zero = torch.zeros_like(e_f[0])
    rows = [e_f[t - 1] if t != EOS_TOKEN else zero for t in labels.tokens[:-1]]
    return torch.stack(rows)
