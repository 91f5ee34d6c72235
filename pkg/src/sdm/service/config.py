"""Service configuration, sourced from the environment."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional


@dataclass
class ServiceConfig:
    port: int = 8000
    checkpoint_path: Optional[str] = None
    llm_endpoint: str = ""
    llm_model: str = ""
    session_limit: int = 32

    def __post_init__(self):
        if self.port <= 0:
            raise ValueError(f"port must be positive, got {self.port}")
        if self.session_limit <= 0:
            raise ValueError(
                f"session_limit must be positive, got {self.session_limit}")

    @staticmethod
    def from_env(env=None) -> "ServiceConfig":
        env = os.environ if env is None else env
        return ServiceConfig(
            port=int(env.get("SDM_PORT", "8000")),
            checkpoint_path=env.get("SDM_CHECKPOINT") or None,
            llm_endpoint=env.get("SDM_LLM_ENDPOINT", ""),
            llm_model=env.get("SDM_LLM_MODEL", ""),
            session_limit=int(env.get("SDM_SESSION_LIMIT", "32")),
        )
