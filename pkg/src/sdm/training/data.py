"""Dataset loading and model-level splitting for training runs."""
from __future__ import annotations

import random
from pathlib import Path

from ..geometry.io import load_model
from ..geometry.mesh import MeshModel


def load_dataset(path) -> list[MeshModel]:
    """All mesh JSON files under a directory, sorted by filename."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory {root} not found")
    models = []
    for p in sorted(root.glob("*.json")):
        if p.name == "manifest.json":
            continue
        models.append(load_model(p))
    if not models:
        raise FileNotFoundError(f"no mesh JSON files in {root}")
    return models


def _signature(m: MeshModel) -> tuple:
    return tuple(sorted(lab.feature_type for lab in m.feature_labels))


def split_dataset(models: list[MeshModel], seed: int,
                  fractions=(0.8, 0.1, 0.1)):
    """Disjoint train/val/test by model, stratified on the multiset of
    feature types each model carries. Largest-remainder allocation keeps
    every stratum's split near the requested fractions."""
    if abs(sum(fractions) - 1.0) > 1e-9 or len(fractions) != 3:
        raise ValueError(f"fractions {fractions} must be 3 values summing to 1")
    ids = [m.model_id for m in models]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate model_id in dataset")

    groups: dict[tuple, list[MeshModel]] = {}
    for m in models:
        groups.setdefault(_signature(m), []).append(m)

    rng = random.Random(seed)
    splits: tuple[list, list, list] = ([], [], [])
    for sig in sorted(groups):
        grp = sorted(groups[sig], key=lambda m: m.model_id)
        rng.shuffle(grp)
        g = len(grp)
        exact = [f * g for f in fractions]
        counts = [int(e) for e in exact]
        while sum(counts) < g:
            rema = [e - c for e, c in zip(exact, counts)]
            counts[rema.index(max(rema))] += 1
        pos = 0
        for k, c in enumerate(counts):
            splits[k].extend(grp[pos:pos + c])
            pos += c
    for part in splits:
        part.sort(key=lambda m: m.model_id)
    return splits
