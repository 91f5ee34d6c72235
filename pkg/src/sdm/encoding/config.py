"""Network hyperparameters shared by the encoder and the pointer decoder."""
from __future__ import annotations

from dataclasses import dataclass

TEXT_DIM = 256


@dataclass
class EncoderConfig:
    d_model: int = 256
    encoder_layers: int = 3
    heads: int = 4
    feed_forward_dim: int = 512
    dropout: float = 0.1
    text_dim: int = TEXT_DIM

    def __post_init__(self):
        if self.d_model % self.heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by heads {self.heads}")
        if self.text_dim != TEXT_DIM:
            raise ValueError(f"text_dim is fixed at {TEXT_DIM}")

    def to_dict(self) -> dict:
        return {
            "d_model": self.d_model,
            "encoder_layers": self.encoder_layers,
            "heads": self.heads,
            "feed_forward_dim": self.feed_forward_dim,
            "dropout": self.dropout,
            "text_dim": self.text_dim,
        }

    @staticmethod
    def from_dict(d: dict) -> "EncoderConfig":
        return EncoderConfig(**d)
