from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class TextEmbedding:
    values: np.ndarray          # (text_dim,)


@dataclass
class FaceEmbedding:
    face_id: int
    values: np.ndarray          # (d_model,)


@dataclass
class GeometricEmbedding:
    """E_F: one row per face, row i corresponds to face_id i+1."""

    values: np.ndarray          # (N, d_model)
