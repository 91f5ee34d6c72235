"""SDM-Mesh JSON v1 persistence.

Canonical serialization: fixed key order, compact separators, floats written
with 17 significant digits so a save/load round trip is bit exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .mesh import (
    FaceRecord,
    FeatureLabel,
    LoopPolygon,
    MeshModel,
    MeshParseError,
    MeshValidationError,
    Triangle,
    validate_model,
)


def _fnum(x: float) -> str:
    # 17 significant digits round-trips any IEEE double
    return format(float(x), ".17g")


def _point(p) -> str:
    return "[" + ",".join(_fnum(c) for c in p) + "]"


def dumps_model(model: MeshModel) -> str:
    """Serialize to the canonical SDM-Mesh JSON v1 byte form."""
    parts = ['{"model_id":', json.dumps(model.model_id), ',"faces":[']
    face_chunks = []
    for f in model.faces:
        tris = ",".join(
            '{"v":[%s],"nbr":[%s]}' % (
                ",".join(_point(v) for v in t.vertices),
                ",".join(str(int(n)) for n in t.neighbor_local),
            )
            for t in f.triangles
        )
        loops = ",".join(
            "[" + ",".join(_point(v) for v in lp.vertices) + "]" for lp in f.loops
        )
        nbrs = ",".join(str(i) for i in sorted(f.neighbor_face_ids))
        face_chunks.append(
            '{"id":%d,"triangles":[%s],"loops":[%s],"neighbor_faces":[%s]}'
            % (f.face_id, tris, loops, nbrs)
        )
    parts.append(",".join(face_chunks))
    parts.append("]")
    if model.feature_labels is not None:
        labels = ",".join(
            '{"type":%s,"face_ids":[%s]}'
            % (json.dumps(l.feature_type), ",".join(str(i) for i in sorted(l.face_ids)))
            for l in model.feature_labels
        )
        parts.append(',"labels":[%s]' % labels)
    parts.append("}")
    return "".join(parts)


def loads_model(text: str, validate: bool = True) -> MeshModel:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise MeshParseError(f"malformed JSON: {e}") from e
    return model_from_dict(raw, validate=validate)


def model_from_dict(raw: dict, validate: bool = True) -> MeshModel:
    if not isinstance(raw, dict):
        raise MeshParseError("top level must be an object")
    try:
        model_id = str(raw["model_id"])
        face_entries = raw["faces"]
    except KeyError as e:
        raise MeshParseError(f"missing required key {e}") from e
    if not isinstance(face_entries, list):
        raise MeshParseError("'faces' must be a list")

    faces = []
    # faces may arrive in any order; sort by id, then validation checks contiguity
    try:
        face_entries = sorted(face_entries, key=lambda d: int(d["id"]))
    except (KeyError, TypeError, ValueError) as e:
        raise MeshParseError(f"face entry without usable 'id': {e}") from e

    for entry in face_entries:
        try:
            tris = [
                Triangle(
                    np.array(t["v"], dtype=np.float64),
                    np.array(t["nbr"], dtype=np.int64),
                )
                for t in entry["triangles"]
            ]
            loops = [LoopPolygon(np.array(lv, dtype=np.float64)) for lv in entry["loops"]]
            nbrs = set(int(i) for i in entry.get("neighbor_faces", []))
            faces.append(FaceRecord(int(entry["id"]), tris, loops, nbrs))
        except MeshValidationError:
            raise
        except Exception as e:
            raise MeshParseError(f"malformed face entry: {e}") from e

    labels = None
    if "labels" in raw and raw["labels"] is not None:
        try:
            labels = [
                FeatureLabel(str(l["type"]), set(int(i) for i in l["face_ids"]))
                for l in raw["labels"]
            ]
        except Exception as e:
            raise MeshParseError(f"malformed label entry: {e}") from e

    model = MeshModel(model_id, faces, labels)
    if validate:
        validate_model(model)
    return model


def save_model(model: MeshModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> MeshModel:
    p = Path(path)
    if not p.exists():
        raise MeshParseError(f"no such file: {p}")
    return loads_model(p.read_text(encoding="utf-8"))
