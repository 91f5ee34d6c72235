"""Flatten tokenized models into index-addressed tensors for batched runs.

Faces across the batch occupy one flat axis (``F`` rows); triangles, loop
rows and adjacency edges carry integer indices into it, so pooling is a
handful of index_add operations regardless of per-model face counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..geometry.mesh import MeshModel
from ..tokens import tokenize_model


@dataclass
class PackedModels:
    tri_loc: torch.Tensor       # (T, 3)
    tri_shape: torch.Tensor     # (T, 15)
    tri_nbr: torch.Tensor       # (T, 3) long, global triangle rows
    tri_face: torch.Tensor      # (T,) long, global face slot
    loop_rows: torch.Tensor     # (R, 6)
    row_loop: torch.Tensor      # (R,) long, global loop slot
    loop_face: torch.Tensor     # (Lp,) long, global face slot
    edge_src: torch.Tensor      # (E,) long
    edge_dst: torch.Tensor      # (E,) long
    face_model: torch.Tensor    # (F,) long
    face_slot: torch.Tensor     # (F,) long, position inside the model
    n_faces: list[int]
    num_loops: int

    @property
    def batch_size(self) -> int:
        return len(self.n_faces)

    @property
    def max_faces(self) -> int:
        return max(self.n_faces)

    @property
    def total_faces(self) -> int:
        return int(self.face_model.shape[0])


def pack_models(models: list[MeshModel], dtype=torch.float32,
                token_cache: dict | None = None) -> PackedModels:
    """token_cache maps model_id to a precomputed tokenize_model result so
    repeated packing (training epochs) skips re-tokenization."""
    tri_loc, tri_shape, tri_nbr, tri_face = [], [], [], []
    loop_rows, row_loop, loop_face = [], [], []
    edge_src, edge_dst = [], []
    face_model, face_slot, n_faces = [], [], []

    face_base = 0
    tri_base = 0
    loop_base = 0
    for b, model in enumerate(models):
        if token_cache is not None and model.model_id in token_cache:
            arrays = token_cache[model.model_id]
        else:
            arrays = tokenize_model(model)
        n = len(arrays)
        n_faces.append(n)
        for f, fa in zip(model.faces, arrays):
            slot = face_base + f.face_id - 1
            for tt in fa.triangle_tokens:
                tri_loc.append(tt.location)
                tri_shape.append(tt.shape)
                tri_nbr.append(tri_base + tt.shape[12:15].astype(np.int64))
                tri_face.append(slot)
            tri_base += len(fa.triangle_tokens)
            for pt in fa.polygon_tokens:
                for row in pt.values:
                    loop_rows.append(row)
                    row_loop.append(loop_base)
                loop_face.append(slot)
                loop_base += 1
            for nb in sorted(f.neighbor_face_ids):
                edge_src.append(face_base + nb - 1)
                edge_dst.append(slot)
            face_model.append(b)
            face_slot.append(f.face_id - 1)
        face_base += n

    def fx(rows, width):
        if rows:
            return torch.tensor(np.asarray(rows), dtype=dtype)
        return torch.zeros((0, width), dtype=dtype)

    def ix(vals, width=None):
        if vals:
            return torch.tensor(np.asarray(vals), dtype=torch.long)
        shape = (0,) if width is None else (0, width)
        return torch.zeros(shape, dtype=torch.long)

    return PackedModels(
        tri_loc=fx(tri_loc, 3),
        tri_shape=fx(tri_shape, 15),
        tri_nbr=ix(tri_nbr, 3),
        tri_face=ix(tri_face),
        loop_rows=fx(loop_rows, 6),
        row_loop=ix(row_loop),
        loop_face=ix(loop_face),
        edge_src=ix(edge_src),
        edge_dst=ix(edge_dst),
        face_model=ix(face_model),
        face_slot=ix(face_slot),
        n_faces=n_faces,
        num_loops=loop_base,
    )
