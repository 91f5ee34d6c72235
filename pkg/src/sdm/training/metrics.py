"""Feature-set generation metrics and evaluation over labeled datasets.

IoU compares the generated face set against the labeled set; exact match
requires set equality. Evaluation regenerates every labeled feature with
the lowest labeled face id as the start face, so results are deterministic
for a fixed checkpoint. The emission-order match rate (generated order ==
start face then ascending) is reported alongside but never gates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..geometry.mesh import MeshModel


def iou(predicted: set[int], truth: set[int]) -> float:
    if not predicted and not truth:
        return 1.0
    union = predicted | truth
    return len(predicted & truth) / len(union)


@dataclass
class MetricsReport:
    iou_mean: float
    em_rate: float
    ordered_em_rate: float
    n_samples: int
    per_type: dict = field(default_factory=dict)
    loss_curve: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.em_rate <= 1.0:
            raise ValueError(f"em_rate {self.em_rate} outside [0,1]")
        if not 0.0 <= self.iou_mean <= 1.0:
            raise ValueError(f"iou_mean {self.iou_mean} outside [0,1]")

    def to_dict(self) -> dict:
        return {
            "iou_mean": self.iou_mean,
            "em_rate": self.em_rate,
            "ordered_em_rate": self.ordered_em_rate,
            "n_samples": self.n_samples,
            "per_type": self.per_type,
            "loss_curve": self.loss_curve,
        }

    @staticmethod
    def from_dict(d: dict) -> "MetricsReport":
        return MetricsReport(
            iou_mean=d["iou_mean"], em_rate=d["em_rate"],
            ordered_em_rate=d.get("ordered_em_rate", 0.0),
            n_samples=d["n_samples"], per_type=d.get("per_type", {}),
            loss_curve=d.get("loss_curve", []))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))


def evaluate(net, models: list[MeshModel], provider=None) -> MetricsReport:
    """Regenerate every labeled feature and score it against its label."""
    from ..generation.pointer import generate_feature_faces

    iou_sum = 0.0
    em_hits = 0
    ordered_hits = 0
    count = 0
    buckets: dict[str, dict] = {}
    for m in models:
        for lab in m.feature_labels:
            truth = set(lab.face_ids)
            sos = min(truth)
            res = generate_feature_faces(m, sos, lab.feature_type, net,
                                         provider=provider)
            sample_iou = iou(res.face_ids, truth)
            em = res.face_ids == truth
            body = [t for t in res.raw_sequence if t != 0]
            ordered = body == [sos] + sorted(truth - {sos})
            iou_sum += sample_iou
            em_hits += em
            ordered_hits += ordered
            count += 1
            b = buckets.setdefault(lab.feature_type,
                                   {"iou_sum": 0.0, "em": 0, "count": 0})
            b["iou_sum"] += sample_iou
            b["em"] += em
            b["count"] += 1

    per_type = {
        t: {"iou_mean": b["iou_sum"] / b["count"],
            "em_rate": b["em"] / b["count"],
            "count": b["count"]}
        for t, b in buckets.items()
    }
    if count == 0:
        return MetricsReport(iou_mean=0.0, em_rate=0.0, ordered_em_rate=0.0,
                             n_samples=0)
    return MetricsReport(
        iou_mean=iou_sum / count,
        em_rate=em_hits / count,
        ordered_em_rate=ordered_hits / count,
        n_samples=count,
        per_type=per_type,
    )
