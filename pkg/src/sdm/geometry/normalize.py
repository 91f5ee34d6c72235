"""Coordinate normalization for scale-stable network inputs."""
from __future__ import annotations

import numpy as np

from .mesh import MeshModel, MeshValidationError, copy_model


def normalize_model(model: MeshModel) -> MeshModel:
    """Center the bounding box at the origin and scale the largest extent to 2.

    All coordinates land in [-1, 1]; labels and adjacency are untouched.
    Idempotent up to roundoff (second pass moves nothing by more than ~1e-12).
    """
    lo, hi = model.bounding_box()
    extent = float((hi - lo).max())
    if extent <= 0.0:
        raise MeshValidationError("degenerate model: bounding box has zero extent")
    center = (lo + hi) / 2.0
    scale = 2.0 / extent

    out = copy_model(model)
    for f in out.faces:
        for t in f.triangles:
            t.vertices = (t.vertices - center) * scale
        for lp in f.loops:
            lp.vertices = (lp.vertices - center) * scale
    return out


def is_normalized(model: MeshModel, tol: float = 1e-9) -> bool:
    lo, hi = model.bounding_box()
    center = (lo + hi) / 2.0
    extent = float((hi - lo).max())
    return bool(np.all(np.abs(center) <= tol) and abs(extent - 2.0) <= tol)
