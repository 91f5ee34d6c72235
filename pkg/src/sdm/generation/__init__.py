from .attention import (
    AttentionWeights,
    cross_attention_fuse,
    fuse_batch,
    fusion_attention_rows,
    pointer_logits,
)
from .pointer import (
    EOS_ID,
    DecoderState,
    GenerationError,
    GenerationResult,
    PointerGenerator,
    decode_step,
    generate_feature_faces,
    masked_distribution,
    select_next,
)

__all__ = [
    "AttentionWeights",
    "cross_attention_fuse",
    "fuse_batch",
    "fusion_attention_rows",
    "pointer_logits",
    "EOS_ID",
    "DecoderState",
    "GenerationError",
    "GenerationResult",
    "PointerGenerator",
    "decode_step",
    "generate_feature_faces",
    "masked_distribution",
    "select_next",
]
