"""Reference prediction backend for the ctiner wire protocol.

Fine-tunes a pretrained transformer token-classification model on CoNLL
data and serves per-entity predictions with character offsets over
POST /v1/predict and GET /v1/health.
"""
from .config import ConfigError, TrainConfig
from .training import DatasetNotFound, LabelMismatch, finetune
from .serving import CheckpointLoadError, build_app, serve

__version__ = "0.1.0"

__all__ = [
    "CheckpointLoadError",
    "ConfigError",
    "DatasetNotFound",
    "LabelMismatch",
    "TrainConfig",
    "build_app",
    "finetune",
    "serve",
]
