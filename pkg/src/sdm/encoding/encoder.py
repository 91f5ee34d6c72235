"""Face embedding network: per-triangle feature extraction, loop and
neighbor pooling, then a transformer encoder over the face set.

Triangle descriptors follow the MeshNet spatial/structural split: the
centroid goes through its own perceptron, the unit normal and the corner
offsets through theirs, and corner descriptors get one round of neighbor
mixing driven by the NI indices. Everything pools by summation, so face
embeddings are invariant to triangle, loop and neighbor order. The
transformer uses no positional encoding (faces are an unordered set) and
pre-norm residual blocks, so an all-zero checkpoint degenerates to the
identity map on the aggregated embeddings.
"""
from __future__ import annotations

import torch
from torch import nn

from ..geometry.mesh import MeshModel
from ..tokens import FaceTokenArray
from .batching import PackedModels, pack_models
from .config import EncoderConfig
from .types import FaceEmbedding, GeometricEmbedding

_HIDDEN = 64


def _mlp(d_in: int, d_out: int) -> nn.Sequential:
    return nn.Sequential(nn.Linear(d_in, _HIDDEN), nn.ReLU(), nn.Linear(_HIDDEN, d_out))


class FaceFeatureExtractor(nn.Module):
    """Token arrays to one pre-aggregation vector per face plus loop vectors."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        d = config.d_model
        self.loc_net = _mlp(3, d)
        self.normal_net = _mlp(3, d)
        self.corner_net = _mlp(9, d)
        self.corner_mix = nn.Linear(2 * d, d)
        self.row_net = _mlp(6, d)
        self.d_model = d

    def triangle_descriptors(self, tri_loc, tri_shape, tri_nbr) -> torch.Tensor:
        corner = self.corner_net(tri_shape[:, 3:12])
        nb = (corner[tri_nbr[:, 0]] + corner[tri_nbr[:, 1]] + corner[tri_nbr[:, 2]]) / 3.0
        mixed = self.corner_mix(torch.cat([corner, nb], dim=-1))
        return self.loc_net(tri_loc) + self.normal_net(tri_shape[:, :3]) + mixed

    def forward(self, packed: PackedModels):
        """Returns (face_vectors (F, d), loop_sums (F, d))."""
        dtype = self.corner_mix.weight.dtype
        tri = self.triangle_descriptors(packed.tri_loc.to(dtype),
                                        packed.tri_shape.to(dtype), packed.tri_nbr)
        F = packed.total_faces
        face_vec = torch.zeros(F, self.d_model, dtype=tri.dtype)
        face_vec.index_add_(0, packed.tri_face, tri)

        rows = self.row_net(packed.loop_rows.to(dtype))
        loops = torch.zeros(packed.num_loops, self.d_model, dtype=rows.dtype)
        loops.index_add_(0, packed.row_loop, rows)
        loop_sum = torch.zeros(F, self.d_model, dtype=rows.dtype)
        loop_sum.index_add_(0, packed.loop_face, loops)
        return face_vec, loop_sum


class HierarchyAggregator(nn.Module):
    """face += P_loop(sum of loops); then face += P_nbr(sum of neighbors)."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        d = config.d_model
        self.loop_proj = nn.Linear(d, d, bias=False)
        self.neighbor_proj = nn.Linear(d, d, bias=False)

    def forward(self, face_vec, loop_sum, edge_src, edge_dst):
        f1 = face_vec + self.loop_proj(loop_sum)
        nbr = torch.zeros_like(f1)
        nbr.index_add_(0, edge_dst, f1[edge_src])
        return f1 + self.neighbor_proj(nbr)


class ModelEncoder(nn.Module):
    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        self.extractor = FaceFeatureExtractor(config)
        self.aggregator = HierarchyAggregator(config)
        # sums over triangles/loops grow with face complexity; normalize so
        # downstream attention and the pointer tanh stay in range
        self.input_norm = nn.LayerNorm(config.d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=config.d_model,
            nhead=config.heads,
            dim_feedforward=config.feed_forward_dim,
            dropout=config.dropout,
            batch_first=True,
            norm_first=True,
        )
        self.transformer = nn.TransformerEncoder(
            layer, num_layers=config.encoder_layers, enable_nested_tensor=False)

    def aggregated(self, packed: PackedModels) -> torch.Tensor:
        """Pre-transformer face embeddings, flat (F, d), normalized."""
        face_vec, loop_sum = self.extractor(packed)
        agg = self.aggregator(face_vec, loop_sum, packed.edge_src, packed.edge_dst)
        return self.input_norm(agg)

    def forward(self, packed: PackedModels):
        """Returns (embeddings (B, N_max, d), pad_mask (B, N_max); True = pad)."""
        flat = self.aggregated(packed)
        B, n_max, d = packed.batch_size, packed.max_faces, self.config.d_model
        x = torch.zeros(B, n_max, d, dtype=flat.dtype)
        x[packed.face_model, packed.face_slot] = flat
        pad = torch.ones(B, n_max, dtype=torch.bool)
        pad[packed.face_model, packed.face_slot] = False
        y = self.transformer(x, src_key_padding_mask=pad)
        return y, pad


def extract_face_features(tokens: FaceTokenArray, extractor: FaceFeatureExtractor):
    """Single-face view of the extractor: (FaceEmbedding, loop vectors)."""
    import numpy as np

    dtype = extractor.corner_mix.weight.dtype
    tri_loc = torch.tensor(np.stack([t.location for t in tokens.triangle_tokens]), dtype=dtype)
    tri_shape = torch.tensor(np.stack([t.shape for t in tokens.triangle_tokens]), dtype=dtype)
    tri_nbr = tri_shape[:, 12:15].long()
    with torch.no_grad():
        tri = extractor.triangle_descriptors(tri_loc, tri_shape, tri_nbr)
        face_vec = tri.sum(dim=0)
        loop_vecs = []
        for pt in tokens.polygon_tokens:
            rows = extractor.row_net(torch.tensor(pt.values, dtype=dtype))
            loop_vecs.append(rows.sum(dim=0).cpu().numpy())
    return FaceEmbedding(tokens.face_id, face_vec.cpu().numpy()), loop_vecs


def encode_model(model: MeshModel, encoder: ModelEncoder) -> GeometricEmbedding:
    """E_F for one model; rows follow face_id order."""
    was_training = encoder.training
    encoder.eval()
    try:
        packed = pack_models([model], dtype=encoder.extractor.corner_mix.weight.dtype)
        with torch.no_grad():
            y, _ = encoder(packed)
    finally:
        encoder.train(was_training)
    return GeometricEmbedding(values=y[0, : model.num_faces].cpu().numpy())
