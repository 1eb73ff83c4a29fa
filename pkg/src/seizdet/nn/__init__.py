"""Minimal CNN stack with hand-written gradients and Adam training."""

from .diagnostics import grad_check, input_sensitivity
from .layers import Conv2D, Dense, Flatten, MaxPool2, ReLU, softmax, softmax_cross_entropy
from .model_io import ModelFormatError, load_model, save_model
from .network import ARCHITECTURE_NAMES, Network, onehot
from .optim import Adam, AdamState, adam_step
from .train import TrainConfig, TrainResult, train

__all__ = [
    "ARCHITECTURE_NAMES",
    "Adam",
    "AdamState",
    "Conv2D",
    "Dense",
    "Flatten",
    "MaxPool2",
    "ModelFormatError",
    "Network",
    "ReLU",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "grad_check",
    "input_sensitivity",
    "load_model",
    "onehot",
    "save_model",
    "softmax",
    "softmax_cross_entropy",
    "train",
]
