from .model import (
    DEFAULT_ARCH,
    FORMAT_VERSION,
    SnoreModel,
    evaluate,
    forward,
    forward_batch,
    init_weights,
    load_model,
    save_model,
)
from .rng import SplitMix64
from .train import AdamState, TrainConfig, gradient_check, train, train_step

__all__ = [
    "DEFAULT_ARCH",
    "FORMAT_VERSION",
    "SnoreModel",
    "evaluate",
    "forward",
    "forward_batch",
    "init_weights",
    "load_model",
    "save_model",
    "SplitMix64",
    "AdamState",
    "TrainConfig",
    "gradient_check",
    "train",
    "train_step",
]
