from .batching import PackedModels, pack_models
from .config import TEXT_DIM, EncoderConfig
from .encoder import (
    FaceFeatureExtractor,
    HierarchyAggregator,
    ModelEncoder,
    encode_model,
    extract_face_features,
)
from .text import LocalTextProvider, RemoteTextProvider, TextProviderError, embed_text
from .types import FaceEmbedding, GeometricEmbedding, TextEmbedding

__all__ = [
    "PackedModels",
    "pack_models",
    "TEXT_DIM",
    "EncoderConfig",
    "FaceFeatureExtractor",
    "HierarchyAggregator",
    "ModelEncoder",
    "encode_model",
    "extract_face_features",
    "LocalTextProvider",
    "RemoteTextProvider",
    "TextProviderError",
    "embed_text",
    "TextEmbedding",
    "FaceEmbedding",
    "GeometricEmbedding",
]
