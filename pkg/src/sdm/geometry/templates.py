"""Parametric machining-feature templates on a rectangular stock box.

A model starts as a box ``[0,W] x [0,D] x [0,H]`` (mm) and each feature cuts
away material, contributing its own new faces and modifying the six stock
faces (band cuts, edge notches, holes). Faces are authored as exact
world-coordinate polygons: the outer loop runs counter-clockwise around the
outward normal, hole loops clockwise. Coordinates shared between adjacent
faces are literally the same floats, so edge-matching adjacency and the
feature labels are correct by construction.

Face ids are assigned in a fixed order: bottom, top regions left to right,
front, back, left, right, then each feature's faces in placement order, so
every label covers a contiguous id range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adjacency import compute_adjacency
from .mesh import FaceRecord, FeatureLabel, LoopPolygon, MeshModel, Triangle
from .triangulate import local_triangle_neighbors, triangulate_indexed

OCTAGON_SEGMENTS = 8

# faces contributed by each feature, in authoring order
FEATURE_FACE_COUNTS = {
    "rect_through_slot": 3,     # wall x0, wall x1, floor
    "rect_blind_slot": 4,       # wall x0, wall x1, end wall, floor
    "triangular_slot": 2,       # left flank, right flank
    "circular_through_hole": OCTAGON_SEGMENTS,
    "circular_blind_hole": OCTAGON_SEGMENTS + 1,
    "rect_pocket": 5,           # four walls, floor
    "step": 2,                  # riser, tread
    "side_notch": 5,            # back wall, wall x0, wall x1, ledge, ceiling
}


class TemplateError(Exception):
    pass


def _newell_normal(poly: np.ndarray) -> np.ndarray:
    n = np.zeros(3)
    for i in range(len(poly)):
        a = poly[i]
        b = poly[(i + 1) % len(poly)]
        n[0] += (a[1] - b[1]) * (a[2] + b[2])
        n[1] += (a[2] - b[2]) * (a[0] + b[0])
        n[2] += (a[0] - b[0]) * (a[1] + b[1])
    length = float(np.linalg.norm(n))
    if length <= 0.0:
        raise TemplateError("degenerate face polygon (zero normal)")
    return n / length


def build_face(face_id: int, outer, holes=()) -> FaceRecord:
    """Triangulate one planar face from exact 3D loops.

    Triangle vertices are taken verbatim from the input loops (the
    triangulator only reindexes), so boundary bits survive untouched.
    """
    outer = np.asarray(outer, dtype=np.float64)
    holes = [np.asarray(h, dtype=np.float64) for h in holes]
    n = _newell_normal(outer)
    helper = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)

    all3d = np.concatenate([outer] + holes, axis=0) if holes else outer
    coords2d = np.stack([all3d @ u, all3d @ v], axis=1)
    outer_idx = list(range(len(outer)))
    hole_idx = []
    base = len(outer)
    for h in holes:
        hole_idx.append(list(range(base, base + len(h))))
        base += len(h)

    tri_idx = triangulate_indexed(coords2d, outer_idx, hole_idx)
    tvs = np.stack([all3d[list(t)] for t in tri_idx])
    ni = local_triangle_neighbors(tvs)
    triangles = [Triangle(tvs[k].copy(), ni[k]) for k in range(len(tri_idx))]
    loops = [LoopPolygon(outer.copy())] + [LoopPolygon(h.copy()) for h in holes]
    return FaceRecord(face_id=face_id, triangles=triangles, loops=loops)


@dataclass
class _Notch:
    """Cutout on the top edge of the front or back stock face."""

    x0: float
    x1: float
    depth: float
    kind: str           # 'rect' or 'vee'
    xm: float = 0.0     # vee apex x


@dataclass
class _Stock:
    """Accumulates the stock-face modifications requested by the features."""

    W: float
    D: float
    H: float
    cut_bands: list = field(default_factory=list)       # (x0, x1): top coverage removed
    blind_notches: list = field(default_factory=list)   # (x0, x1, d1): top front-edge cuts
    top_holes: list = field(default_factory=list)
    bottom_holes: list = field(default_factory=list)
    front_notches: list = field(default_factory=list)
    back_notches: list = field(default_factory=list)
    front_holes: list = field(default_factory=list)
    right_top: float = 0.0                              # z extent of the right face

    def __post_init__(self):
        self.right_top = self.H


def _octagon_xy(cx: float, cy: float, r: float) -> np.ndarray:
    pts = np.empty((OCTAGON_SEGMENTS, 2))
    for i in range(OCTAGON_SEGMENTS):
        a = 2.0 * math.pi * i / OCTAGON_SEGMENTS
        pts[i] = (cx + r * math.cos(a), cy + r * math.sin(a))
    return pts


def _with_z(xy: np.ndarray, z: float) -> np.ndarray:
    out = np.empty((len(xy), 3))
    out[:, :2] = xy
    out[:, 2] = z
    return out


# one author per feature type; each registers its stock modifications and
# returns the feature's own faces as (outer, holes) pairs

def _author_rect_through_slot(s: _Stock, p: dict):
    x0, x1, t = p["x0"], p["x1"], p["depth"]
    zb = s.H - t
    s.cut_bands.append((x0, x1))
    s.front_notches.append(_Notch(x0, x1, t, "rect"))
    s.back_notches.append(_Notch(x0, x1, t, "rect"))
    wall0 = [(x0, 0.0, zb), (x0, s.D, zb), (x0, s.D, s.H), (x0, 0.0, s.H)]
    wall1 = [(x1, 0.0, zb), (x1, 0.0, s.H), (x1, s.D, s.H), (x1, s.D, zb)]
    floor = [(x0, 0.0, zb), (x1, 0.0, zb), (x1, s.D, zb), (x0, s.D, zb)]
    return [(wall0, []), (wall1, []), (floor, [])]


def _author_rect_blind_slot(s: _Stock, p: dict):
    x0, x1, t, d1 = p["x0"], p["x1"], p["depth"], p["length"]
    zb = s.H - t
    s.blind_notches.append((x0, x1, d1))
    s.front_notches.append(_Notch(x0, x1, t, "rect"))
    wall0 = [(x0, 0.0, zb), (x0, d1, zb), (x0, d1, s.H), (x0, 0.0, s.H)]
    wall1 = [(x1, 0.0, zb), (x1, 0.0, s.H), (x1, d1, s.H), (x1, d1, zb)]
    endw = [(x0, d1, zb), (x1, d1, zb), (x1, d1, s.H), (x0, d1, s.H)]
    floor = [(x0, 0.0, zb), (x1, 0.0, zb), (x1, d1, zb), (x0, d1, zb)]
    return [(wall0, []), (wall1, []), (endw, []), (floor, [])]


def _author_triangular_slot(s: _Stock, p: dict):
    x0, x1, t = p["x0"], p["x1"], p["depth"]
    xm = (x0 + x1) / 2.0
    zb = s.H - t
    s.cut_bands.append((x0, x1))
    s.front_notches.append(_Notch(x0, x1, t, "vee", xm))
    s.back_notches.append(_Notch(x0, x1, t, "vee", xm))
    left = [(x0, 0.0, s.H), (xm, 0.0, zb), (xm, s.D, zb), (x0, s.D, s.H)]
    right = [(x1, 0.0, s.H), (x1, s.D, s.H), (xm, s.D, zb), (xm, 0.0, zb)]
    return [(left, []), (right, [])]


def _octagon_walls(pxy: np.ndarray, zb: float, zt: float):
    walls = []
    for i in range(OCTAGON_SEGMENTS):
        a = pxy[i]
        b = pxy[(i + 1) % OCTAGON_SEGMENTS]
        quad = [(a[0], a[1], zb), (a[0], a[1], zt), (b[0], b[1], zt), (b[0], b[1], zb)]
        walls.append((quad, []))
    return walls


def _author_circular_through_hole(s: _Stock, p: dict):
    pxy = _octagon_xy(p["cx"], p["cy"], p["r"])
    s.top_holes.append(_with_z(pxy[::-1], s.H))
    s.bottom_holes.append(_with_z(pxy, 0.0))
    return _octagon_walls(pxy, 0.0, s.H)


def _author_circular_blind_hole(s: _Stock, p: dict):
    pxy = _octagon_xy(p["cx"], p["cy"], p["r"])
    zb = s.H - p["depth"]
    s.top_holes.append(_with_z(pxy[::-1], s.H))
    floor = _with_z(pxy, zb)
    return _octagon_walls(pxy, zb, s.H) + [(floor, [])]


def _author_rect_pocket(s: _Stock, p: dict):
    x0, x1, y0, y1, t = p["x0"], p["x1"], p["y0"], p["y1"], p["depth"]
    zb = s.H - t
    H = s.H
    s.top_holes.append(np.array(
        [(x0, y0, H), (x0, y1, H), (x1, y1, H), (x1, y0, H)]))
    wx0 = [(x0, y0, zb), (x0, y1, zb), (x0, y1, H), (x0, y0, H)]
    wx1 = [(x1, y0, zb), (x1, y0, H), (x1, y1, H), (x1, y1, zb)]
    wy0 = [(x0, y0, zb), (x0, y0, H), (x1, y0, H), (x1, y0, zb)]
    wy1 = [(x0, y1, zb), (x1, y1, zb), (x1, y1, H), (x0, y1, H)]
    floor = [(x0, y0, zb), (x1, y0, zb), (x1, y1, zb), (x0, y1, zb)]
    return [(wx0, []), (wx1, []), (wy0, []), (wy1, []), (floor, [])]


def _author_step(s: _Stock, p: dict):
    xs, t = p["x0"], p["depth"]
    zb = s.H - t
    s.cut_bands.append((xs, s.W))
    s.front_notches.append(_Notch(xs, s.W, t, "rect"))
    s.back_notches.append(_Notch(xs, s.W, t, "rect"))
    s.right_top = zb
    riser = [(xs, 0.0, zb), (xs, s.D, zb), (xs, s.D, s.H), (xs, 0.0, s.H)]
    tread = [(xs, 0.0, zb), (s.W, 0.0, zb), (s.W, s.D, zb), (xs, s.D, zb)]
    return [(riser, []), (tread, [])]


def _author_side_notch(s: _Stock, p: dict):
    x0, x1, z0, z1, ty = p["x0"], p["x1"], p["z0"], p["z1"], p["length"]
    s.front_holes.append(np.array(
        [(x0, 0.0, z0), (x0, 0.0, z1), (x1, 0.0, z1), (x1, 0.0, z0)]))
    back = [(x0, ty, z0), (x1, ty, z0), (x1, ty, z1), (x0, ty, z1)]
    wx0 = [(x0, 0.0, z0), (x0, ty, z0), (x0, ty, z1), (x0, 0.0, z1)]
    wx1 = [(x1, 0.0, z0), (x1, 0.0, z1), (x1, ty, z1), (x1, ty, z0)]
    ledge = [(x0, 0.0, z0), (x1, 0.0, z0), (x1, ty, z0), (x0, ty, z0)]
    ceil = [(x0, 0.0, z1), (x0, ty, z1), (x1, ty, z1), (x1, 0.0, z1)]
    return [(back, []), (wx0, []), (wx1, []), (ledge, []), (ceil, [])]


_AUTHORS = {
    "rect_through_slot": _author_rect_through_slot,
    "rect_blind_slot": _author_rect_blind_slot,
    "triangular_slot": _author_triangular_slot,
    "circular_through_hole": _author_circular_through_hole,
    "circular_blind_hole": _author_circular_blind_hole,
    "rect_pocket": _author_rect_pocket,
    "step": _author_step,
    "side_notch": _author_side_notch,
}


def _front_outline(s: _Stock):
    """Front stock face (y=0), CCW about the outward -y normal."""
    corner = [n for n in s.front_notches if n.x1 == s.W]
    interior = sorted((n for n in s.front_notches if n.x1 < s.W), key=lambda n: -n.x0)
    pts = [(0.0, 0.0, 0.0), (s.W, 0.0, 0.0)]
    if corner:
        c = corner[0]
        zb = s.H - c.depth
        pts += [(s.W, 0.0, zb), (c.x0, 0.0, zb), (c.x0, 0.0, s.H)]
    else:
        pts.append((s.W, 0.0, s.H))
    for n in interior:
        zb = s.H - n.depth
        if n.kind == "rect":
            pts += [(n.x1, 0.0, s.H), (n.x1, 0.0, zb), (n.x0, 0.0, zb), (n.x0, 0.0, s.H)]
        else:
            pts += [(n.x1, 0.0, s.H), (n.xm, 0.0, zb), (n.x0, 0.0, s.H)]
    pts.append((0.0, 0.0, s.H))
    return _dedup(pts)


def _back_outline(s: _Stock):
    """Back stock face (y=D), CCW about the outward +y normal."""
    corner = [n for n in s.back_notches if n.x1 == s.W]
    interior = sorted((n for n in s.back_notches if n.x1 < s.W), key=lambda n: n.x0)
    D = s.D
    pts = [(s.W, D, 0.0), (0.0, D, 0.0), (0.0, D, s.H)]
    for n in interior:
        zb = s.H - n.depth
        if n.kind == "rect":
            pts += [(n.x0, D, s.H), (n.x0, D, zb), (n.x1, D, zb), (n.x1, D, s.H)]
        else:
            pts += [(n.x0, D, s.H), (n.xm, D, zb), (n.x1, D, s.H)]
    if corner:
        c = corner[0]
        zb = s.H - c.depth
        pts += [(c.x0, D, s.H), (c.x0, D, zb), (s.W, D, zb)]
    else:
        pts.append((s.W, D, s.H))
    return _dedup(pts)


def _dedup(pts):
    out = []
    for p in pts:
        if out and p == out[-1]:
            continue
        out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return np.array(out, dtype=np.float64)


def _top_regions(s: _Stock):
    """Top coverage split into x-bands by the cutting features."""
    regions = []
    prev = 0.0
    for a, b in sorted(s.cut_bands):
        if a < prev:
            raise TemplateError("overlapping top cut bands")
        if a > prev:
            regions.append((prev, a))
        prev = b
    if prev < s.W:
        regions.append((prev, s.W))
    return regions


def _top_region_face(s: _Stock, ra: float, rb: float):
    notches = sorted(
        ((x0, x1, d1) for x0, x1, d1 in s.blind_notches if ra < x0 and x1 < rb),
        key=lambda n: n[0])
    H = s.H
    pts = [(ra, 0.0, H)]
    for x0, x1, d1 in notches:
        pts += [(x0, 0.0, H), (x0, d1, H), (x1, d1, H), (x1, 0.0, H)]
    pts += [(rb, 0.0, H), (rb, s.D, H), (ra, s.D, H)]
    holes = [h for h in s.top_holes if ra < h[:, 0].min() and h[:, 0].max() < rb]
    return _dedup(pts), holes


def assemble_box_model(model_id: str, W: float, D: float, H: float,
                       features: list[tuple[str, dict]]) -> MeshModel:
    """Build a labeled model from stock dimensions and placed features.

    ``features``: (type, params) pairs; callers are responsible for placing
    features in disjoint x-bands (the step, if any, must come last).
    """
    stock = _Stock(W, D, H)
    per_feature_faces = []
    for ftype, params in features:
        if ftype not in _AUTHORS:
            raise TemplateError(f"unknown feature type '{ftype}'")
        per_feature_faces.append(_AUTHORS[ftype](stock, params))

    base_faces: list[tuple] = []
    bottom = np.array([(0.0, 0.0, 0.0), (0.0, D, 0.0), (W, D, 0.0), (W, 0.0, 0.0)])
    base_faces.append((bottom, stock.bottom_holes))
    for ra, rb in _top_regions(stock):
        base_faces.append(_top_region_face(stock, ra, rb))
    base_faces.append((_front_outline(stock), stock.front_holes))
    base_faces.append((_back_outline(stock), []))
    left = np.array([(0.0, D, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, H), (0.0, D, H)])
    base_faces.append((left, []))
    zt = stock.right_top
    right = np.array([(W, 0.0, 0.0), (W, D, 0.0), (W, D, zt), (W, 0.0, zt)])
    base_faces.append((right, []))

    faces = []
    fid = 1
    for outer, holes in base_faces:
        faces.append(build_face(fid, outer, holes))
        fid += 1
    labels = []
    for (ftype, _), flist in zip(features, per_feature_faces):
        ids = []
        for outer, holes in flist:
            faces.append(build_face(fid, outer, holes))
            ids.append(fid)
            fid += 1
        labels.append(FeatureLabel(feature_type=ftype, face_ids=set(ids)))

    model = MeshModel(model_id=model_id, faces=faces, feature_labels=labels)
    return compute_adjacency(model)
