"""Face adjacency from shared triangle edges."""
from __future__ import annotations

from .mesh import FaceRecord, MeshModel, copy_model

# pre-normalization model units; templates emit exact coordinates
VERTEX_TOL = 1e-9


def _vkey(v, tol: float):
    return (int(round(v[0] / tol)), int(round(v[1] / tol)), int(round(v[2] / tol)))


def compute_adjacency(model: MeshModel, tol: float = VERTEX_TOL) -> MeshModel:
    """Return a copy with neighbor_face_ids rebuilt from coincident triangle edges.

    Two faces are adjacent when any triangle edge of one coincides with a
    triangle edge of the other (vertices identical within ``tol``). Isolated
    faces simply end up with empty neighbor sets.
    """
    out = copy_model(model)
    edge_faces: dict[tuple, set[int]] = {}
    for f in out.faces:
        for t in f.triangles:
            for e in range(3):
                k1 = _vkey(t.vertices[e], tol)
                k2 = _vkey(t.vertices[(e + 1) % 3], tol)
                key = (k1, k2) if k1 <= k2 else (k2, k1)
                edge_faces.setdefault(key, set()).add(f.face_id)

    nbrs: dict[int, set[int]] = {f.face_id: set() for f in out.faces}
    for members in edge_faces.values():
        if len(members) < 2:
            continue
        for a in members:
            for b in members:
                if a != b:
                    nbrs[a].add(b)
    for f in out.faces:
        f.neighbor_face_ids = nbrs[f.face_id]
    return out


def adjacency_is_symmetric(model: MeshModel) -> bool:
    table = {f.face_id: f.neighbor_face_ids for f in model.faces}
    return all(fid in table[nb] for fid, ns in table.items() for nb in ns)
