"""Mesh-level edit operations on generated face sets.

Edits are pure functions model -> model. Faces own their vertex storage,
so touching the targeted set can never perturb other faces: untargeted
faces are carried over bit-identical, which stands in for the vertex
duplication a B-rep modeler would perform before a local edit. No
re-stitching is attempted; recorded adjacency is kept as the topological
record of the original solid.

Every successful edit also emits neutral api_calls descriptors
({"function", "arguments"}) that replay() can execute to reproduce the
result exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .geometry.mesh import FaceRecord, FeatureLabel, LoopPolygon, MeshModel, Triangle
from .parsing.schema import StructuredCommand

_AXIS_VECTORS = {
    "X": np.array([1.0, 0.0, 0.0]),
    "Y": np.array([0.0, 1.0, 0.0]),
    "Z": np.array([0.0, 0.0, 1.0]),
}


class EditError(ValueError):
    pass


@dataclass
class EditOp:
    type: str
    face_ids: set[int]
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.face_ids:
            raise EditError("edit target is empty")
        if self.type not in ("move", "rotate", "delete", "resize"):
            raise EditError(f"unsupported operation {self.type!r}")


@dataclass
class EditResult:
    model: MeshModel
    api_calls: list[dict]
    changed_face_ids: set[int]
    id_remap: Optional[dict[int, int]] = None


def _check_ids(model: MeshModel, face_ids: Iterable[int]) -> list[int]:
    ids = sorted(set(int(i) for i in face_ids))
    if not ids:
        raise EditError("edit target is empty")
    n = model.num_faces
    bad = [i for i in ids if not 1 <= i <= n]
    if bad:
        raise EditError(f"face ids {bad} outside 1..{n}")
    return ids


def _transform_faces(model: MeshModel, targets: set[int], fn) -> MeshModel:
    """New model with fn applied to targeted vertices; others carried as is."""
    faces = []
    for f in model.faces:
        if f.face_id not in targets:
            faces.append(f)
            continue
        tris = [Triangle(vertices=fn(t.vertices), neighbor_local=t.neighbor_local.copy())
                for t in f.triangles]
        loops = [LoopPolygon(vertices=fn(lp.vertices)) for lp in f.loops]
        faces.append(FaceRecord(face_id=f.face_id, triangles=tris, loops=loops,
                                neighbor_face_ids=set(f.neighbor_face_ids)))
    labels = None
    if model.feature_labels is not None:
        labels = [FeatureLabel(l.feature_type, set(l.face_ids))
                  for l in model.feature_labels]
    return MeshModel(model_id=model.model_id, faces=faces, feature_labels=labels)


def _target_centroid(model: MeshModel, targets: set[int]) -> np.ndarray:
    """Mean of the distinct vertices of the targeted faces."""
    seen = set()
    acc = np.zeros(3)
    count = 0
    for f in model.faces:
        if f.face_id not in targets:
            continue
        for t in f.triangles:
            for v in t.vertices:
                key = v.tobytes()
                if key not in seen:
                    seen.add(key)
                    acc += v
                    count += 1
    if count == 0:
        raise EditError("targeted faces have no vertices")
    return acc / count


def apply_move(model: MeshModel, face_ids, axis: str, sign: str,
               distance_mm: float) -> EditResult:
    ids = _check_ids(model, face_ids)
    if axis not in _AXIS_VECTORS:
        raise EditError(f"axis must be X, Y or Z, got {axis!r}")
    if sign not in ("+", "-"):
        raise EditError(f"sign must be '+' or '-', got {sign!r}")
    if not distance_mm > 0:
        raise EditError(f"distance_mm must be > 0, got {distance_mm}")
    delta = _AXIS_VECTORS[axis] * (distance_mm if sign == "+" else -distance_mm)
    new = _transform_faces(model, set(ids), lambda v: v + delta)
    call = {"function": "move_faces",
            "arguments": {"face_ids": ids, "axis": axis, "sign": sign,
                          "distance_mm": float(distance_mm)}}
    return EditResult(model=new, api_calls=[call], changed_face_ids=set(ids))


def _rotation_matrix(axis: str, angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    if axis == "X":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=np.float64)
    if axis == "Y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=np.float64)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=np.float64)


def apply_rotate(model: MeshModel, face_ids, axis: str,
                 angle_deg: float) -> EditResult:
    ids = _check_ids(model, face_ids)
    if axis not in _AXIS_VECTORS:
        raise EditError(f"axis must be X, Y or Z, got {axis!r}")
    if not -360.0 < angle_deg < 360.0 or angle_deg == 0:
        raise EditError(f"angle_deg must be nonzero in (-360, 360), got {angle_deg}")
    center = _target_centroid(model, set(ids))
    rot = _rotation_matrix(axis, angle_deg)
    new = _transform_faces(model, set(ids),
                           lambda v: (v - center) @ rot.T + center)
    call = {"function": "rotate_faces",
            "arguments": {"face_ids": ids, "axis": axis,
                          "angle_deg": float(angle_deg)}}
    return EditResult(model=new, api_calls=[call], changed_face_ids=set(ids))


def apply_resize(model: MeshModel, face_ids, factor: float) -> EditResult:
    ids = _check_ids(model, face_ids)
    if not factor > 0:
        raise EditError(f"factor must be > 0, got {factor}")
    center = _target_centroid(model, set(ids))
    new = _transform_faces(model, set(ids),
                           lambda v: center + factor * (v - center))
    call = {"function": "resize_faces",
            "arguments": {"face_ids": ids, "factor": float(factor)}}
    return EditResult(model=new, api_calls=[call], changed_face_ids=set(ids))


def apply_delete(model: MeshModel, face_ids) -> EditResult:
    ids = _check_ids(model, face_ids)
    doomed = set(ids)
    if len(doomed) >= model.num_faces:
        raise EditError("deletion would empty the model")
    remap: dict[int, int] = {}
    new_id = 0
    for f in model.faces:
        if f.face_id not in doomed:
            new_id += 1
            remap[f.face_id] = new_id

    faces = []
    for f in model.faces:
        if f.face_id in doomed:
            continue
        faces.append(FaceRecord(
            face_id=remap[f.face_id],
            triangles=[Triangle(vertices=t.vertices.copy(),
                                neighbor_local=t.neighbor_local.copy())
                       for t in f.triangles],
            loops=[LoopPolygon(vertices=lp.vertices.copy()) for lp in f.loops],
            neighbor_face_ids={remap[n] for n in f.neighbor_face_ids
                               if n not in doomed},
        ))
    labels = None
    if model.feature_labels is not None:
        labels = []
        for l in model.feature_labels:
            kept = {remap[i] for i in l.face_ids if i not in doomed}
            if kept:
                labels.append(FeatureLabel(l.feature_type, kept))
    new = MeshModel(model_id=model.model_id, faces=faces, feature_labels=labels)
    call = {"function": "delete_faces", "arguments": {"face_ids": ids}}
    return EditResult(model=new, api_calls=[call], changed_face_ids=set(ids),
                      id_remap=remap)


def compile_api_calls(command: StructuredCommand, face_ids) -> list[EditOp]:
    """One EditOp per command entry, command order preserved."""
    ids = set(int(i) for i in face_ids)
    ops = []
    for k, cmd in enumerate(command.commands):
        kind = cmd.operation.type
        if kind not in ("move", "rotate", "delete", "resize"):
            raise EditError(
                f"command {k + 1}: unsupported operation {kind!r}; "
                "supported: move, rotate, delete, resize")
        ops.append(EditOp(type=kind, face_ids=set(ids),
                          parameters=dict(cmd.operation.parameters)))
    return ops


def apply_op(model: MeshModel, op: EditOp) -> EditResult:
    if op.type == "move":
        p = op.parameters
        return apply_move(model, op.face_ids, p.get("axis"), p.get("sign"),
                          p.get("distance_mm", 0.0))
    if op.type == "rotate":
        p = op.parameters
        return apply_rotate(model, op.face_ids, p.get("axis"),
                            p.get("angle_deg", 0.0))
    if op.type == "resize":
        return apply_resize(model, op.face_ids, op.parameters.get("factor", 0.0))
    return apply_delete(model, op.face_ids)


def apply_sequence(model: MeshModel, ops: list[EditOp]) -> EditResult:
    """Run ops in order; a delete remaps the surviving targets of later ops."""
    if not ops:
        raise EditError("no operations to apply")
    current = model
    calls: list[dict] = []
    changed: set[int] = set()
    remap: Optional[dict[int, int]] = None
    pending = [EditOp(o.type, set(o.face_ids), dict(o.parameters)) for o in ops]
    for i, op in enumerate(pending):
        res = apply_op(current, op)
        current = res.model
        calls.extend(res.api_calls)
        changed |= res.changed_face_ids
        if res.id_remap is not None:
            remap = res.id_remap if remap is None else {
                old: res.id_remap[mid] for old, mid in remap.items()
                if mid in res.id_remap}
            for later in pending[i + 1:]:
                later.face_ids = {res.id_remap[f] for f in later.face_ids
                                  if f in res.id_remap}
                if not later.face_ids:
                    raise EditError(
                        "a later operation's targets were all deleted")
    return EditResult(model=current, api_calls=calls,
                      changed_face_ids=changed, id_remap=remap)


def replay(model: MeshModel, api_calls: list[dict]) -> MeshModel:
    """Re-execute a descriptor log against a model."""
    current = model
    for k, call in enumerate(api_calls):
        fn = call.get("function")
        args = call.get("arguments", {})
        try:
            if fn == "move_faces":
                current = apply_move(current, args["face_ids"], args["axis"],
                                     args["sign"], args["distance_mm"]).model
            elif fn == "rotate_faces":
                current = apply_rotate(current, args["face_ids"], args["axis"],
                                       args["angle_deg"]).model
            elif fn == "resize_faces":
                current = apply_resize(current, args["face_ids"],
                                       args["factor"]).model
            elif fn == "delete_faces":
                current = apply_delete(current, args["face_ids"]).model
            else:
                raise EditError(f"call {k + 1}: unknown function {fn!r}")
        except KeyError as exc:
            raise EditError(f"call {k + 1}: missing argument {exc}")
    return current
