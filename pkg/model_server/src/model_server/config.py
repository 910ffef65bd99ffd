"""Training configuration mirroring the library's fine-tuning signature."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """A training config field is missing or out of range."""


@dataclass(frozen=True)
class TrainConfig:
    checkpoint_dir: str
    dataset: str
    transformers_model: str
    lr: float | None = None  # default depends on model size, see resolved_lr
    epochs: int = 20
    max_seq_length: int = 128
    batch_size: int = 32

    def __post_init__(self) -> None:
        if self.lr is not None and self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.max_seq_length < 8:
            raise ConfigError(f"max_seq_length must be >= 8, got {self.max_seq_length}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.transformers_model:
            raise ConfigError("transformers_model must be set")

    def resolved_lr(self) -> float:
        """Explicit lr, else 5e-6 for large models and 1e-5 for base ones."""
        if self.lr is not None:
            return self.lr
        return 5e-6 if "large" in self.transformers_model.lower() else 1e-5

    @classmethod
    def from_file(cls, path: str | Path) -> "TrainConfig":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        known = {
            "checkpoint_dir",
            "dataset",
            "transformers_model",
            "lr",
            "epochs",
            "max_seq_length",
            "batch_size",
        }
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        missing = {"checkpoint_dir", "dataset", "transformers_model"} - set(payload)
        if missing:
            raise ConfigError(f"{path}: missing config keys {sorted(missing)}")
        return cls(**payload)
