"""Synthetic labeled dataset generation.

Each model is a stock box carrying 1-3 features placed in disjoint x-bands.
Feature types cycle round-robin through the 8-type enum so a batch of any
real size covers all types nearly evenly; the model index alone decides how
many features a model gets (1, 2, 3, 1, ...), keeping counts stable across
seeds. All randomness comes from per-model ``random.Random`` instances, so
a skipped model never shifts its successors.
"""
from __future__ import annotations

import json
import logging
import random
from pathlib import Path

from ..vocab import FEATURE_TYPES
from .io import save_model
from .mesh import MeshError
from .templates import TemplateError, assemble_box_model
from .triangulate import TriangulationError
from .mesh import validate_model

log = logging.getLogger(__name__)

# feature band width as a fraction of stock width W
_WIDTH_FRAC = {
    "rect_through_slot": (0.08, 0.18),
    "rect_blind_slot": (0.08, 0.18),
    "triangular_slot": (0.10, 0.20),
    "circular_through_hole": (0.16, 0.24),
    "circular_blind_hole": (0.16, 0.24),
    "rect_pocket": (0.16, 0.28),
    "step": (0.16, 0.30),
    "side_notch": (0.12, 0.22),
}

_MARGIN_FRAC = 0.06     # stock left/right of the outermost bands
_GAP_FRAC = 0.05        # stock between adjacent bands
_MAX_ATTEMPTS = 3


class PlacementError(TemplateError):
    pass


def _r3(x: float) -> float:
    return round(float(x), 3)


def _allocate_bands(rng: random.Random, W: float, types: list[str]):
    """Disjoint x-bands in order; a step band always ends at x=W."""
    m = _MARGIN_FRAC * W
    g = _GAP_FRAC * W
    widths = [rng.uniform(*_WIDTH_FRAC[t]) * W for t in types]

    has_step = types and types[-1] == "step"
    ns_widths = widths[:-1] if has_step else widths
    right = (W - widths[-1] - g) if has_step else (W - m)
    avail = right - m
    need = sum(ns_widths) + g * max(len(ns_widths) - 1, 0)
    if ns_widths and need > avail:
        scale = (avail - g * (len(ns_widths) - 1)) / sum(ns_widths) * 0.98
        ns_widths = [w * scale for w in ns_widths]
        if min(ns_widths) < 0.04 * W:
            raise PlacementError("bands do not fit on the stock")
        need = sum(ns_widths) + g * max(len(ns_widths) - 1, 0)

    leftover = max(avail - need, 0.0)
    weights = [rng.random() for _ in range(len(ns_widths) + 1)]
    total_w = sum(weights) or 1.0
    extras = [leftover * w / total_w for w in weights]

    bands = []
    x = m + extras[0]
    for i, w in enumerate(ns_widths):
        x0 = _r3(x)
        x1 = _r3(x + w)
        if x1 - x0 < 1.0:
            raise PlacementError("band narrower than 1 mm")
        bands.append((x0, x1))
        x = x + w + g + extras[i + 1]
    if has_step:
        xs = _r3(W - widths[-1])
        if bands and xs - bands[-1][1] < g * 0.5:
            raise PlacementError("step band collides with previous band")
        bands.append((xs, W))
    return bands


def _sample_params(rng: random.Random, ftype: str, band, W, D, H) -> dict:
    a, b = band
    if ftype == "rect_through_slot":
        return {"x0": a, "x1": b, "depth": _r3(rng.uniform(0.25, 0.50) * H)}
    if ftype == "rect_blind_slot":
        return {"x0": a, "x1": b,
                "depth": _r3(rng.uniform(0.25, 0.50) * H),
                "length": _r3(rng.uniform(0.30, 0.65) * D)}
    if ftype == "triangular_slot":
        return {"x0": a, "x1": b, "depth": _r3(rng.uniform(0.25, 0.55) * H)}
    if ftype in ("circular_through_hole", "circular_blind_hole"):
        r = _r3(rng.uniform(0.55, 0.80) * min(0.45 * (b - a), 0.30 * D))
        pad = 0.05 * (b - a)
        cx = _r3(rng.uniform(a + r + pad, b - r - pad))
        cy = _r3(rng.uniform(r + 0.10 * D, 0.90 * D - r))
        p = {"cx": cx, "cy": cy, "r": r}
        if ftype == "circular_blind_hole":
            p["depth"] = _r3(rng.uniform(0.30, 0.60) * H)
        return p
    if ftype == "rect_pocket":
        return {"x0": a, "x1": b,
                "y0": _r3(rng.uniform(0.12, 0.35) * D),
                "y1": _r3(rng.uniform(0.55, 0.88) * D),
                "depth": _r3(rng.uniform(0.25, 0.50) * H)}
    if ftype == "step":
        return {"x0": a, "depth": _r3(rng.uniform(0.25, 0.55) * H)}
    if ftype == "side_notch":
        return {"x0": a, "x1": b,
                "z0": _r3(rng.uniform(0.15, 0.35) * H),
                "z1": _r3(rng.uniform(0.55, 0.80) * H),
                "length": _r3(rng.uniform(0.20, 0.45) * D)}
    raise PlacementError(f"unknown feature type '{ftype}'")


def build_random_model(model_id: str, rng: random.Random, types: list[str]):
    """One stock box with the given feature types (step moved last)."""
    W = _r3(rng.uniform(40.0, 80.0))
    D = _r3(rng.uniform(30.0, 60.0))
    H = _r3(rng.uniform(20.0, 40.0))
    ordered = [t for t in types if t != "step"] + [t for t in types if t == "step"]
    bands = _allocate_bands(rng, W, ordered)
    features = [(t, _sample_params(rng, t, band, W, D, H))
                for t, band in zip(ordered, bands)]
    return validate_model(assemble_box_model(model_id, W, D, H, features))


def _types_for_index(index: int) -> list[str]:
    """Round-robin: model i takes the next (i mod 3)+1 types from the cycle."""
    n = index % 3 + 1
    start = sum(k % 3 + 1 for k in range(index))
    return [FEATURE_TYPES[(start + j) % len(FEATURE_TYPES)] for j in range(n)]


def generate_synthetic_dataset(count: int, seed: int, out_dir) -> dict:
    """Write ``count`` labeled models plus a manifest; returns the manifest.

    Deterministic for a given (count, seed): same files, same bytes. A model
    whose placement keeps failing after bounded retries is skipped and logged;
    the manifest records what was actually written.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    per_type = {t: 0 for t in FEATURE_TYPES}
    models = []
    skipped = []
    for i in range(count):
        model_id = f"synth_{i:05d}"
        types = _types_for_index(i)
        rng = random.Random((seed << 20) + i)
        model = None
        reason = ""
        for _ in range(_MAX_ATTEMPTS):
            try:
                model = build_random_model(model_id, rng, types)
                break
            except (TemplateError, TriangulationError, MeshError) as exc:
                reason = str(exc)
        if model is None:
            log.warning("skipping %s after %d attempts: %s", model_id, _MAX_ATTEMPTS, reason)
            skipped.append({"index": i, "model_id": model_id, "reason": reason})
            continue
        fname = f"{model_id}.json"
        save_model(model, out / fname)
        for label in model.feature_labels:
            per_type[label.feature_type] += 1
        models.append({
            "file": fname,
            "model_id": model_id,
            "num_faces": model.num_faces,
            "feature_types": [l.feature_type for l in model.feature_labels],
        })

    manifest = {
        "count_requested": count,
        "count_written": len(models),
        "seed": seed,
        "per_type_counts": per_type,
        "skipped": skipped,
        "models": models,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest
