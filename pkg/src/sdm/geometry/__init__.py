from .mesh import (
    FaceRecord,
    FeatureLabel,
    LoopPolygon,
    MeshError,
    MeshModel,
    MeshParseError,
    MeshValidationError,
    Triangle,
    Vec3,
    copy_model,
    models_equal,
    validate_model,
)
from .io import dumps_model, load_model, loads_model, save_model
from .adjacency import adjacency_is_symmetric, compute_adjacency
from .normalize import is_normalized, normalize_model
from .synth import build_random_model, generate_synthetic_dataset
from .templates import FEATURE_FACE_COUNTS, assemble_box_model

__all__ = [
    "FaceRecord",
    "FeatureLabel",
    "LoopPolygon",
    "MeshError",
    "MeshModel",
    "MeshParseError",
    "MeshValidationError",
    "Triangle",
    "Vec3",
    "copy_model",
    "models_equal",
    "validate_model",
    "dumps_model",
    "load_model",
    "loads_model",
    "save_model",
    "adjacency_is_symmetric",
    "compute_adjacency",
    "is_normalized",
    "normalize_model",
    "build_random_model",
    "generate_synthetic_dataset",
    "assemble_box_model",
    "FEATURE_FACE_COUNTS",
]
