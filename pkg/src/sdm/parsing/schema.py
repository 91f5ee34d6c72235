"""Structured edit-command schema and validation.

The wire format is one JSON object:

    {"commands": [{"feature": {"type": "...", "hint": "..."},
                   "operation": {"type": "move", "parameters": {...}}}],
     "verified": true}

Operation parameter contracts:
    move   {"axis": "X"|"Y"|"Z", "sign": "+"|"-", "distance_mm": > 0}
    rotate {"axis": "X"|"Y"|"Z", "angle_deg": nonzero, inside (-360, 360)}
    delete {}
    resize {"factor": > 0}

Validation reports every violation, not just the first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..vocab import UnknownFeatureType, canonical_feature_type

OPERATION_TYPES = ("move", "rotate", "delete", "resize")
AXES = ("X", "Y", "Z")
SIGNS = ("+", "-")


@dataclass
class FeatureRef:
    type: str
    hint: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"type": self.type}
        if self.hint is not None:
            d["hint"] = self.hint
        return d


@dataclass
class Operation:
    type: str
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"type": self.type, "parameters": dict(self.parameters)}


@dataclass
class Command:
    feature: FeatureRef
    operation: Operation

    def to_dict(self) -> dict:
        return {"feature": self.feature.to_dict(),
                "operation": self.operation.to_dict()}


@dataclass
class StructuredCommand:
    commands: list[Command]
    verified: bool = False

    def to_dict(self) -> dict:
        return {"commands": [c.to_dict() for c in self.commands],
                "verified": self.verified}


def _num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_parameters(op_type: str, params, where: str, out: list[str]) -> None:
    if not isinstance(params, dict):
        out.append(f"{where}: parameters must be an object")
        return
    if op_type == "move":
        axis = params.get("axis")
        if axis not in AXES:
            out.append(f"{where}: move requires axis one of {list(AXES)}")
        if params.get("sign") not in SIGNS:
            out.append(f"{where}: move requires sign '+' or '-'")
        dist = params.get("distance_mm")
        if not _num(dist):
            out.append(f"{where}: move requires distance_mm")
        elif dist <= 0:
            out.append(f"{where}: distance_mm must be > 0, got {dist}")
    elif op_type == "rotate":
        if params.get("axis") not in AXES:
            out.append(f"{where}: rotate requires axis one of {list(AXES)}")
        ang = params.get("angle_deg")
        if not _num(ang):
            out.append(f"{where}: rotate requires angle_deg")
        elif not -360.0 < ang < 360.0 or ang == 0:
            out.append(f"{where}: angle_deg must be nonzero in (-360, 360), got {ang}")
    elif op_type == "delete":
        if params:
            out.append(f"{where}: delete takes no parameters, got {sorted(params)}")
    elif op_type == "resize":
        factor = params.get("factor")
        if not _num(factor):
            out.append(f"{where}: resize requires factor")
        elif factor <= 0:
            out.append(f"{where}: factor must be > 0, got {factor}")


def validate_schema(candidate) -> Union[StructuredCommand, list[str]]:
    """Full schema check; returns the typed command on success, otherwise
    the complete list of violations."""
    violations: list[str] = []
    if not isinstance(candidate, dict):
        return [f"top level must be an object, got {type(candidate).__name__}"]
    raw_cmds = candidate.get("commands")
    if not isinstance(raw_cmds, list) or not raw_cmds:
        violations.append("commands must be a non-empty list")
        return violations

    parsed: list[Command] = []
    for k, entry in enumerate(raw_cmds):
        where = f"command {k + 1}"
        if not isinstance(entry, dict):
            violations.append(f"{where}: must be an object")
            continue
        feat = entry.get("feature")
        ftype = ""
        hint = None
        if not isinstance(feat, dict) or not isinstance(feat.get("type"), str):
            violations.append(f"{where}: feature.type string required")
        else:
            ftype = feat["type"]
            hint = feat.get("hint")
            if hint is not None and not isinstance(hint, str):
                violations.append(f"{where}: feature.hint must be a string")
            try:
                # aliases like "slot" are accepted but stored canonically
                ftype = canonical_feature_type(ftype)
            except UnknownFeatureType:
                violations.append(f"{where}: unknown feature type {ftype!r}")
        op = entry.get("operation")
        if not isinstance(op, dict) or op.get("type") not in OPERATION_TYPES:
            violations.append(
                f"{where}: operation.type must be one of {list(OPERATION_TYPES)}")
            continue
        _check_parameters(op["type"], op.get("parameters", {}), where, violations)
        parsed.append(Command(feature=FeatureRef(type=ftype, hint=hint),
                              operation=Operation(type=op["type"],
                                                  parameters=dict(op.get("parameters", {})))))

    if violations:
        return violations
    return StructuredCommand(commands=parsed,
                             verified=bool(candidate.get("verified", True)))
