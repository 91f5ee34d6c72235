"""Mesh interchange model: a kernel-free stand-in for a tessellated B-rep.

A model is a flat list of faces with stable 1..N ids. Each face owns its
triangles and boundary loops outright (no shared vertex pool), so editing a
face never perturbs another face's coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np


class MeshError(Exception):
    """Base class for mesh interchange errors."""


class MeshParseError(MeshError):
    """Raised when a mesh file cannot be read or is structurally malformed."""


class MeshValidationError(MeshError):
    """Raised when a structurally valid file violates a model invariant."""


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise MeshValidationError(f"non-finite coordinate in {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @staticmethod
    def from_array(a) -> "Vec3":
        return Vec3(float(a[0]), float(a[1]), float(a[2]))


@dataclass
class Triangle:
    """One tessellation triangle of a face.

    ``neighbor_local`` holds indices of adjacent triangles within the same
    face; slots without a neighbor carry the triangle's own index.
    """

    vertices: np.ndarray            # (3, 3) float64
    neighbor_local: np.ndarray      # (3,) int64, self-index padded

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        self.neighbor_local = np.asarray(self.neighbor_local, dtype=np.int64)
        if self.vertices.shape != (3, 3):
            raise MeshValidationError(f"triangle vertex array has shape {self.vertices.shape}")
        if self.neighbor_local.shape != (3,):
            raise MeshValidationError("triangle needs exactly 3 neighbor slots")

    def area(self) -> float:
        d1 = self.vertices[1] - self.vertices[0]
        d2 = self.vertices[2] - self.vertices[0]
        return 0.5 * float(np.linalg.norm(np.cross(d1, d2)))

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


@dataclass
class LoopPolygon:
    """Closed boundary loop of a face; the last vertex connects to the first."""

    vertices: np.ndarray            # (n, 3) float64, n >= 3

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshValidationError("loop vertices must be an (n, 3) array")

    def __len__(self) -> int:
        return self.vertices.shape[0]


@dataclass
class FaceRecord:
    face_id: int
    triangles: list[Triangle]
    loops: list[LoopPolygon]
    neighbor_face_ids: set[int] = field(default_factory=set)


@dataclass
class FeatureLabel:
    feature_type: str
    face_ids: set[int]


@dataclass
class MeshModel:
    """Immutable-by-convention model; operations return fresh instances."""

    model_id: str
    faces: list[FaceRecord]
    feature_labels: Optional[list[FeatureLabel]] = None

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def face(self, face_id: int) -> FaceRecord:
        f = self.faces[face_id - 1]
        if f.face_id != face_id:
            raise MeshValidationError(f"face list out of id order at {face_id}")
        return f

    def all_vertices(self) -> np.ndarray:
        """Every triangle and loop vertex, stacked (k, 3)."""
        chunks = []
        for f in self.faces:
            for t in f.triangles:
                chunks.append(t.vertices)
            for lp in f.loops:
                chunks.append(lp.vertices)
        return np.concatenate(chunks, axis=0) if chunks else np.zeros((0, 3))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.all_vertices()
        if v.shape[0] == 0:
            raise MeshValidationError("model has no geometry")
        return v.min(axis=0), v.max(axis=0)


def copy_model(model: MeshModel, model_id: Optional[str] = None) -> MeshModel:
    faces = [
        FaceRecord(
            face_id=f.face_id,
            triangles=[Triangle(t.vertices.copy(), t.neighbor_local.copy()) for t in f.triangles],
            loops=[LoopPolygon(lp.vertices.copy()) for lp in f.loops],
            neighbor_face_ids=set(f.neighbor_face_ids),
        )
        for f in model.faces
    ]
    labels = None
    if model.feature_labels is not None:
        labels = [FeatureLabel(l.feature_type, set(l.face_ids)) for l in model.feature_labels]
    return MeshModel(model_id if model_id is not None else model.model_id, faces, labels)


def models_equal(a: MeshModel, b: MeshModel) -> bool:
    """Exact equality of ids, geometry bits, adjacency and labels."""
    if a.model_id != b.model_id or len(a.faces) != len(b.faces):
        return False
    for fa, fb in zip(a.faces, b.faces):
        if fa.face_id != fb.face_id or fa.neighbor_face_ids != fb.neighbor_face_ids:
            return False
        if len(fa.triangles) != len(fb.triangles) or len(fa.loops) != len(fb.loops):
            return False
        for ta, tb in zip(fa.triangles, fb.triangles):
            if not np.array_equal(ta.vertices, tb.vertices):
                return False
            if not np.array_equal(ta.neighbor_local, tb.neighbor_local):
                return False
        for la, lb in zip(fa.loops, fb.loops):
            if not np.array_equal(la.vertices, lb.vertices):
                return False
    la, lb = a.feature_labels, b.feature_labels
    if (la is None) != (lb is None):
        return False
    if la is not None:
        if len(la) != len(lb):
            return False
        for x, y in zip(la, lb):
            if x.feature_type != y.feature_type or x.face_ids != y.face_ids:
                return False
    return True


def validate_model(model: MeshModel) -> MeshModel:
    """Check every model invariant; raise MeshValidationError on the first break."""
    if not model.faces:
        raise MeshValidationError("model has no faces")
    ids = [f.face_id for f in model.faces]
    if ids != list(range(1, len(ids) + 1)):
        raise MeshValidationError(f"non-contiguous face IDs: {sorted(ids)}")

    verts = model.all_vertices()
    if not np.all(np.isfinite(verts)):
        raise MeshValidationError("non-finite coordinates in model")
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    extent = float((hi - lo).max())
    # area threshold stated in normalized units (max extent 2); rescale to model units
    area_floor = 1e-12 * (extent / 2.0) ** 2 if extent > 0 else 1e-12

    id_set = set(ids)
    for f in model.faces:
        if not f.triangles:
            raise MeshValidationError(f"face {f.face_id} has no triangles")
        if not f.loops:
            raise MeshValidationError(f"face {f.face_id} has no loops")
        n_tri = len(f.triangles)
        for k, t in enumerate(f.triangles):
            if t.area() <= area_floor:
                raise MeshValidationError(f"degenerate triangle {k} in face {f.face_id}")
            for ni in t.neighbor_local:
                if not (0 <= int(ni) < n_tri):
                    raise MeshValidationError(
                        f"triangle neighbor index {int(ni)} out of range in face {f.face_id}")
        for lp in f.loops:
            if len(lp) < 3:
                raise MeshValidationError(f"loop with <3 vertices in face {f.face_id}")
            closed = np.vstack([lp.vertices, lp.vertices[:1]])
            if np.any(np.all(np.diff(closed, axis=0) == 0.0, axis=1)):
                raise MeshValidationError(f"repeated consecutive loop vertex in face {f.face_id}")
        if f.face_id in f.neighbor_face_ids:
            raise MeshValidationError(f"face {f.face_id} lists itself as neighbor")
        for nb in f.neighbor_face_ids:
            if nb not in id_set:
                raise MeshValidationError(f"face {f.face_id} references unknown neighbor {nb}")

    # adjacency symmetry
    nbrs = {f.face_id: f.neighbor_face_ids for f in model.faces}
    for fid, ns in nbrs.items():
        for nb in ns:
            if fid not in nbrs[nb]:
                raise MeshValidationError(f"asymmetric adjacency {fid} -> {nb}")

    if model.feature_labels is not None:
        for label in model.feature_labels:
            missing = label.face_ids - id_set
            if missing:
                raise MeshValidationError(
                    f"label '{label.feature_type}' references unknown faces {sorted(missing)}")
    return model


def labeled_features(model: MeshModel) -> Iterable[FeatureLabel]:
    return list(model.feature_labels or [])
