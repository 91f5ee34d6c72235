from .data import load_dataset, split_dataset
from .labels import EOS_TOKEN, LabelError, LabelSequence, build_labels, teacher_forcing_inputs
from .loss import CLAMP_EPS, TrainingError, masked_weighted_bce
from .metrics import MetricsReport, evaluate, iou
from .trainer import TrainConfig, batch_loss, label_length_for, train

__all__ = [
    "CLAMP_EPS",
    "EOS_TOKEN",
    "LabelError",
    "LabelSequence",
    "MetricsReport",
    "TrainConfig",
    "TrainingError",
    "batch_loss",
    "build_labels",
    "evaluate",
    "iou",
    "label_length_for",
    "load_dataset",
    "split_dataset",
    "teacher_forcing_inputs",
    "train",
]
