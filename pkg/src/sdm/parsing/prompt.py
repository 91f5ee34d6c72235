"""Chain-of-thought prompt construction for the LLM parse engine.

The template walks the model through five fixed steps (feature types,
operation types, parameters, JSON formatting, self-verification), after a
terminology glossary and before worked multi-operation examples and the
output schema. Rendering is pure: same text and version, same prompt.
"""
from __future__ import annotations

from ..vocab import DISPLAY_NAMES

TEMPLATE_VERSIONS = ("v1",)


class PromptError(ValueError):
    pass


_GLOSSARY = """\
CAD terminology:
- Machining feature: a semantic group of faces cut into stock, such as a
  slot, hole, pocket, step, or notch.
- Direct modeling: history-free editing that manipulates boundary faces.
- Feature types in this workbench: {types}.
- Axis conventions: forward = +X, back = -X, right = +Y, left = -Y,
  up = +Z, down = -Z. Distances are millimeters, angles are degrees.
"""

_STEPS = """\
Convert the designer command into structured JSON by reasoning through
five steps:
Step 1: Identify every machining feature the command mentions and map each
to a feature type from the list above. Pronouns like "it" refer to the
most recent feature.
Step 2: Identify the operation requested for each feature: move, rotate,
delete, or resize.
Step 3: Extract the parameters of each operation: axis and signed
distance_mm for move; axis and angle_deg for rotate; factor for resize;
delete takes none. Apply the axis conventions to direction words.
Step 4: Format the result as a single JSON object following the schema
below, one entry per operation, in command order.
Step 5: The assistant conducts self-verification to ensure the JSON is
schema-valid, the feature types are from the vocabulary, and every
parameter matches the original command; set "verified" to true only when
the check passes.
"""

_SCHEMA_BLOCK = """\
Output schema (reply with JSON only, no prose):
{
  "commands": [
    {
      "feature": {"type": "<feature type>", "hint": "<optional qualifier>"},
      "operation": {"type": "move|rotate|delete|resize",
                    "parameters": {"axis": "X|Y|Z", "sign": "+|-",
                                   "distance_mm": 0, "angle_deg": 0,
                                   "factor": 0}}
    }
  ],
  "verified": true
}
Include only the parameter keys that the operation type requires.
"""

_FEW_SHOTS = """\
Worked examples:

Example 1
Command: "move the slot 3mm forward and rotate the pocket 45 degrees about Z"
Reasoning: two features (slot -> rect_through_slot, pocket -> rect_pocket);
operations move then rotate; forward means +X so axis X sign + distance 3;
angle 45 about Z. JSON checked against the schema.
JSON:
{"commands": [
  {"feature": {"type": "rect_through_slot"},
   "operation": {"type": "move", "parameters": {"axis": "X", "sign": "+", "distance_mm": 3}}},
  {"feature": {"type": "rect_pocket"},
   "operation": {"type": "rotate", "parameters": {"axis": "Z", "angle_deg": 45}}}
], "verified": true}

Example 2
Command: "delete the circular through hole, then shrink the step by half"
Reasoning: hole -> circular_through_hole with delete (no parameters);
step -> step resized by factor 0.5. Both entries verified.
JSON:
{"commands": [
  {"feature": {"type": "circular_through_hole"},
   "operation": {"type": "delete", "parameters": {}}},
  {"feature": {"type": "step"},
   "operation": {"type": "resize", "parameters": {"factor": 0.5}}}
], "verified": true}

Example 3
Command: "shift the blind slot 2.5 mm up and then turn it 30 degrees around X"
Reasoning: blind slot -> rect_blind_slot; shift is a move, up means +Z,
distance 2.5; "it" keeps the same feature; turn is rotate, 30 degrees
about X. Verified.
JSON:
{"commands": [
  {"feature": {"type": "rect_blind_slot"},
   "operation": {"type": "move", "parameters": {"axis": "Z", "sign": "+", "distance_mm": 2.5}}},
  {"feature": {"type": "rect_blind_slot", "hint": "it"},
   "operation": {"type": "rotate", "parameters": {"axis": "X", "angle_deg": 30}}}
], "verified": true}
"""


def build_cot_prompt(text: str, version: str = "v1") -> str:
    """Deterministic prompt for one designer command."""
    if not text or not text.strip():
        raise PromptError("empty command text")
    if version not in TEMPLATE_VERSIONS:
        raise PromptError(
            f"unknown template version {version!r}; known: {TEMPLATE_VERSIONS}")
    types = ", ".join(f"{c} ({d})" for c, d in DISPLAY_NAMES.items())
    return "\n".join([
        _GLOSSARY.format(types=types),
        _STEPS,
        _FEW_SHOTS,
        _SCHEMA_BLOCK,
        f'Command: "{text.strip()}"',
    ])
