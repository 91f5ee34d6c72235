"""Full network: face encoder, pointer generator, local text table."""
from __future__ import annotations

from torch import nn

from .encoding.config import EncoderConfig
from .encoding.encoder import ModelEncoder
from .encoding.text import LocalTextProvider
from .generation.pointer import PointerGenerator


class SdmNet(nn.Module):
    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        self.encoder = ModelEncoder(config)
        self.generator = PointerGenerator(config)
        self.text_provider = LocalTextProvider(config.text_dim)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
