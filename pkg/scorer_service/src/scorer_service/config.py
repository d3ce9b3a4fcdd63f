"""Service configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

MODEL_PATH_ENV = "MCQA_MODEL_PATH"

DEFAULT_PORT = 8750
DEFAULT_MAX_SEQ_LEN = 300
MIN_MAX_SEQ_LEN = 16

MIN_CANDIDATES = 2
MAX_CANDIDATES = 8


@dataclass(frozen=True)
class ServiceConfig:
    model_path: Path
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    device: str = "cpu"

    def __post_init__(self) -> None:
        object.__setattr__(self, "model_path", Path(self.model_path))
        if self.max_seq_len < MIN_MAX_SEQ_LEN:
            raise ValueError(f"max_seq_len must be >= {MIN_MAX_SEQ_LEN}, got {self.max_seq_len}")


def config_from_env(**overrides) -> ServiceConfig:
    """Build a config taking the model path from MCQA_MODEL_PATH unless given."""
    if "model_path" not in overrides:
        path = os.environ.get(MODEL_PATH_ENV)
        if not path:
            raise ValueError(f"no model path: pass --model or set {MODEL_PATH_ENV}")
        overrides["model_path"] = path
    return ServiceConfig(**overrides)
