"""Face tokenization: segments, boundary loops, and triangles become fixed
width numeric tokens, grouped per face.

A segment token is the start vertex stacked with the direction to the end
vertex. A polygon token stacks the segment tokens of a loop, closing edge
included. A triangle gets two tokens: its centroid (location) and a 15-wide
shape vector [normal; corner offsets D1 D2 D3; local neighbor indices].
Vertices carry no tokens of their own; they are implied by the segments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry.mesh import LoopPolygon, MeshModel, Triangle, Vec3


class TokenError(Exception):
    pass


@dataclass
class SegmentToken:
    values: np.ndarray          # (6,) [v1; d]


@dataclass
class PolygonToken:
    values: np.ndarray          # (n, 6), one segment token per row


@dataclass
class TriangleToken:
    location: np.ndarray        # (3,) centroid C
    shape: np.ndarray           # (15,) [N; D1; D2; D3; NI]


@dataclass
class FaceTokenArray:
    face_id: int
    triangle_tokens: list[TriangleToken]
    polygon_tokens: list[PolygonToken]


def _as_point(v) -> np.ndarray:
    if isinstance(v, Vec3):
        return v.as_array()
    a = np.asarray(v, dtype=np.float64)
    if a.shape != (3,):
        raise TokenError(f"expected a 3-vector, got shape {a.shape}")
    return a


def tokenize_segment(v1, v2) -> SegmentToken:
    p1 = _as_point(v1)
    p2 = _as_point(v2)
    d = p2 - p1
    if not np.any(d != 0.0):
        raise TokenError(f"degenerate segment at {p1.tolist()}")
    return SegmentToken(np.concatenate([p1, d]))


def tokenize_polygon(p: LoopPolygon) -> PolygonToken:
    v = p.vertices
    n = v.shape[0]
    rows = np.empty((n, 6), dtype=np.float64)
    for i in range(n):
        rows[i] = tokenize_segment(v[i], v[(i + 1) % n]).values
    return PolygonToken(rows)


def tokenize_triangle(t: Triangle) -> TriangleToken:
    v = t.vertices
    c = (v[0] + v[1] + v[2]) / 3.0
    cross = np.cross(v[1] - v[0], v[2] - v[0])
    norm = float(np.linalg.norm(cross))
    if norm <= 0.0:
        raise TokenError("zero-area triangle")
    shape = np.concatenate([
        cross / norm,
        v[0] - c,
        v[1] - c,
        v[2] - c,
        t.neighbor_local.astype(np.float64),
    ])
    return TriangleToken(location=c, shape=shape)


def tokenize_model(model: MeshModel) -> list[FaceTokenArray]:
    out = []
    for f in model.faces:
        out.append(FaceTokenArray(
            face_id=f.face_id,
            triangle_tokens=[tokenize_triangle(t) for t in f.triangles],
            polygon_tokens=[tokenize_polygon(lp) for lp in f.loops],
        ))
    return out
