"""Deterministic command grammar: the offline counterpart to the LLM engine.

Clause structure is [verb][feature phrase][parameters], with multi-op
commands split on "and"/"then"/","/";". Direction words map to the fixed
bench convention: forward = +X, back = -X, right = +Y, left = -Y,
up = +Z, down = -Z. "it" refers to the feature of the previous clause.
Shrink/reduce with a plain factor F means scaling by 1/F; percentages are
always fractions of the current size for every resize verb.

The parser is total: any input yields either a schema-valid command or a
failure naming the clause and character offset that broke.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..vocab import canonical_feature_type, feature_phrases
from .schema import StructuredCommand, validate_schema

VERB_MAP = {
    "move": "move", "translate": "move", "shift": "move",
    "rotate": "rotate", "turn": "rotate",
    "delete": "delete", "remove": "delete",
    "scale": "resize", "resize": "resize",
    "enlarge": "resize", "grow": "resize",
    "shrink": "resize", "reduce": "resize",
}

DIRECTION_MAP = {
    "forward": ("X", "+"), "forwards": ("X", "+"),
    "back": ("X", "-"), "backward": ("X", "-"), "backwards": ("X", "-"),
    "right": ("Y", "+"), "rightward": ("Y", "+"),
    "left": ("Y", "-"), "leftward": ("Y", "-"),
    "up": ("Z", "+"), "upward": ("Z", "+"), "upwards": ("Z", "+"),
    "down": ("Z", "-"), "downward": ("Z", "-"), "downwards": ("Z", "-"),
}

_SPLIT = re.compile(r"\band\b|\bthen\b|[,;]")
_NUM = r"(\d+(?:\.\d+)?)"
_DIST = re.compile(_NUM + r"\s*(?:mm\b|millimet(?:er|re)s?\b)")
_ANGLE = re.compile(_NUM + r"\s*(?:degrees?\b|deg\b|°)")
_AXIS_WORD = re.compile(r"\b([xyz])\s*-?\s*axis\b")
_AXIS_PREP = re.compile(r"\b(?:about|around|along|on)\s+(?:the\s+)?([xyz])\b")
_NEGATIVE = re.compile(r"\bnegative\b|\bminus\b")
_FACTOR = re.compile(r"\bfactor\s+(?:of\s+)?" + _NUM)
_PERCENT = re.compile(_NUM + r"\s*(?:%|percent\b)")
_TIMES = re.compile(_NUM + r"\s*(?:x\b|times\b)")
_BY_NUM = re.compile(r"\bby\s+" + _NUM + r"\b(?!\s*(?:%|percent|mm|millimet|degrees?|deg))")


@dataclass
class ParseResult:
    structured: Optional[StructuredCommand]
    source: str
    failure: Optional[str] = None
    raw: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.structured is not None


class _ClauseError(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _find_feature(clause: str) -> Optional[str]:
    for phrase in feature_phrases():
        if re.search(rf"\b{re.escape(phrase)}\b", clause):
            return canonical_feature_type(phrase)
    return None


def _axis_from(clause: str):
    m = _AXIS_WORD.search(clause) or _AXIS_PREP.search(clause)
    return m.group(1).upper() if m else None


def _direction_from(clause: str):
    for word, pair in DIRECTION_MAP.items():
        if re.search(rf"\b{word}\b", clause):
            return pair
    return None


def _parse_move(clause: str) -> dict:
    dist = _DIST.search(clause)
    if not dist:
        raise _ClauseError("move needs a distance in mm")
    axis = _axis_from(clause)
    direction = _direction_from(clause)
    if axis is None and direction is None:
        raise _ClauseError("move needs an axis or a direction word")
    if axis is None:
        axis = direction[0]
    if _NEGATIVE.search(clause):
        sign = "-"
    elif direction is not None:
        sign = direction[1]
    else:
        sign = "+"
    return {"axis": axis, "sign": sign, "distance_mm": float(dist.group(1))}


def _parse_rotate(clause: str) -> dict:
    ang = _ANGLE.search(clause)
    if not ang:
        raise _ClauseError("rotate needs an angle in degrees")
    axis = _axis_from(clause)
    if axis is None:
        direction = _direction_from(clause)
        if direction is None:
            raise _ClauseError("rotate needs an axis")
        axis = direction[0]
    angle = float(ang.group(1))
    if _NEGATIVE.search(clause) or re.search(r"\bclockwise\b", clause):
        angle = -angle
    return {"axis": axis, "angle_deg": angle}


def _parse_resize(clause: str, verb: str) -> dict:
    shrinking = verb in ("shrink", "reduce")
    m = _PERCENT.search(clause)
    if m:
        return {"factor": float(m.group(1)) / 100.0}
    m = _FACTOR.search(clause) or _TIMES.search(clause) or _BY_NUM.search(clause)
    if m:
        f = float(m.group(1))
        if shrinking and f > 1.0:
            f = 1.0 / f
        return {"factor": f}
    if re.search(r"\bhalf\b", clause):
        return {"factor": 0.5}
    if re.search(r"\bdouble\b|\btwice\b", clause):
        return {"factor": 2.0}
    raise _ClauseError("resize needs a factor, percentage, or multiplier")


def _parse_clause(clause: str, prev_feature: Optional[str]):
    words = clause.split()
    verb = None
    for word in words[:4]:
        if word in VERB_MAP:
            verb = VERB_MAP[word]
            verb_word = word
            break
    if verb is None:
        raise _ClauseError("no supported verb (move/rotate/delete/resize family)")

    feature = _find_feature(clause)
    hint = None
    if feature is None:
        if re.search(r"\bit\b", clause):
            if prev_feature is None:
                raise _ClauseError("'it' has no earlier feature to refer to")
            feature = prev_feature
            hint = "it"
        else:
            raise _ClauseError("no recognizable feature phrase")

    if verb == "move":
        params = _parse_move(clause)
    elif verb == "rotate":
        params = _parse_rotate(clause)
    elif verb == "delete":
        params = {}
    else:
        params = _parse_resize(clause, verb_word)
    entry = {"feature": {"type": feature},
             "operation": {"type": verb, "parameters": params}}
    if hint is not None:
        entry["feature"]["hint"] = hint
    return entry, feature


def parse_with_grammar(text: str) -> ParseResult:
    """Total, deterministic parse of a designer command."""
    if not isinstance(text, str) or not text.strip():
        return ParseResult(None, "grammar", failure="empty command", raw=text)
    lower = text.lower()

    clauses = []
    pos = 0
    for sep in _SPLIT.finditer(lower):
        clauses.append((pos, lower[pos:sep.start()]))
        pos = sep.end()
    clauses.append((pos, lower[pos:]))
    clauses = [(off + len(c) - len(c.lstrip()), c.strip())
               for off, c in clauses if c.strip()]
    if not clauses:
        return ParseResult(None, "grammar", failure="empty command", raw=text)

    entries = []
    prev_feature = None
    for idx, (offset, clause) in enumerate(clauses):
        try:
            entry, prev_feature = _parse_clause(clause, prev_feature)
        except _ClauseError as e:
            return ParseResult(
                None, "grammar", raw=text,
                failure=f"clause {idx + 1} (offset {offset}): {e.reason}")
        entries.append(entry)

    candidate = {"commands": entries, "verified": True}
    checked = validate_schema(candidate)
    if isinstance(checked, list):
        return ParseResult(None, "grammar", raw=text,
                           failure="; ".join(checked))
    return ParseResult(checked, "grammar", raw=text)
