"""Feature-type vocabulary shared by the dataset, the generator condition, and
the command parser.

Canonical types are the eight machining features the synthetic templates can
cut. Designer-facing phrases ("Slot", "Circular Through Hole", ...) resolve to
canonical types through the alias table; generic words fall back to the
documented defaults (Slot -> rect_through_slot, Hole -> circular_through_hole).
"""
from __future__ import annotations

FEATURE_TYPES = (
    "rect_through_slot",
    "rect_blind_slot",
    "triangular_slot",
    "circular_through_hole",
    "circular_blind_hole",
    "rect_pocket",
    "step",
    "side_notch",
)

DISPLAY_NAMES = {
    "rect_through_slot": "Rectangular Through Slot",
    "rect_blind_slot": "Rectangular Blind Slot",
    "triangular_slot": "Triangular Slot",
    "circular_through_hole": "Circular Through Hole",
    "circular_blind_hole": "Circular Blind Hole",
    "rect_pocket": "Rectangular Pocket",
    "step": "Step",
    "side_notch": "Side Notch",
}

# normalized phrase -> canonical type; includes the generic fallbacks
_ALIASES = {
    "rect_through_slot": "rect_through_slot",
    "rectangular_through_slot": "rect_through_slot",
    "through_slot": "rect_through_slot",
    "slot": "rect_through_slot",
    "rect_blind_slot": "rect_blind_slot",
    "rectangular_blind_slot": "rect_blind_slot",
    "blind_slot": "rect_blind_slot",
    "triangular_slot": "triangular_slot",
    "triangle_slot": "triangular_slot",
    "v_slot": "triangular_slot",
    "circular_through_hole": "circular_through_hole",
    "through_hole": "circular_through_hole",
    "circular_hole": "circular_through_hole",
    "round_hole": "circular_through_hole",
    "hole": "circular_through_hole",
    "circular_blind_hole": "circular_blind_hole",
    "blind_hole": "circular_blind_hole",
    "rect_pocket": "rect_pocket",
    "rectangular_pocket": "rect_pocket",
    "pocket": "rect_pocket",
    "step": "step",
    "side_notch": "side_notch",
    "notch": "side_notch",
}


class UnknownFeatureType(ValueError):
    pass


def _normalize(text: str) -> str:
    return "_".join(text.strip().lower().replace("-", " ").replace("_", " ").split())


def canonical_feature_type(text: str) -> str:
    """Resolve any vocabulary phrase to its canonical type.

    Raises UnknownFeatureType when the phrase is not in the vocabulary.
    """
    if not text or not text.strip():
        raise UnknownFeatureType("empty feature type")
    key = _normalize(text)
    if key in _ALIASES:
        return _ALIASES[key]
    raise UnknownFeatureType(
        f"unknown feature type {text!r}; known: {', '.join(FEATURE_TYPES)}")


def feature_phrases() -> list[str]:
    """All phrases the command grammar recognizes, longest first."""
    phrases = {k.replace("_", " ") for k in _ALIASES}
    return sorted(phrases, key=lambda p: (-len(p.split()), p))


def display_name(canonical: str) -> str:
    return DISPLAY_NAMES[canonical]
