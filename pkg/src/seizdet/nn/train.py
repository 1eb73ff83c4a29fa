"""Minibatch training loop with optional early stopping."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .network import Network, onehot
from .optim import Adam

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0
    learning_rate: float = 1e-3
    #: Fraction of patterns held out for early stopping; 0 disables it.
    val_fraction: float = 0.1
    patience: int = 5

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in [0, 1)")


@dataclass
class TrainResult:
    loss_history: list[float]
    val_history: list[float]
    epochs_run: int


def _mean_loss(network: Network, patterns: np.ndarray, targets: np.ndarray, batch: int) -> float:
    from .layers import softmax_cross_entropy

    total = 0.0
    for i in range(0, len(patterns), batch):
        logits = network.forward(patterns[i : i + batch])
        losses, _, _ = softmax_cross_entropy(logits, targets[i : i + batch])
        total += float(losses.sum())
    return total / len(patterns)


def train(
    network: Network,
    patterns: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
) -> tuple[Network, TrainResult]:
    """Train in place with Adam; returns the network and per-epoch mean losses.

    Deterministic under ``config.seed``: the validation split and every
    epoch's shuffle come from one seeded stream, and gradients accumulate in
    fixed batch order.
    """
    patterns = np.asarray(patterns, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(patterns) == 0:
        raise ValueError("cannot train on an empty pattern set")
    if len(patterns) != len(labels):
        raise ValueError("patterns and labels disagree in length")
    if len(np.unique(labels)) < 2:
        log.warning("training set contains a single class; proceeding anyway")

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x7124]))
    perm = rng.permutation(len(patterns))
    n_val = int(config.val_fraction * len(patterns))
    val_idx, fit_idx = perm[:n_val], perm[n_val:]
    if len(fit_idx) == 0:
        raise ValueError("validation split left no training patterns")

    fit_x, fit_t = patterns[fit_idx], onehot(labels[fit_idx])
    val_x = patterns[val_idx]
    val_t = onehot(labels[val_idx]) if n_val else None

    optimizer = Adam(lr=config.learning_rate)
    loss_history: list[float] = []
    val_history: list[float] = []
    best_val = np.inf
    stale = 0

    for epoch in range(config.epochs):
        order = rng.permutation(len(fit_x))
        epoch_loss = 0.0
        for i in range(0, len(order), config.batch_size):
            sel = order[i : i + config.batch_size]
            loss = network.loss_and_grads(fit_x[sel], fit_t[sel])
            optimizer.step(network.parameters())
            epoch_loss += loss * len(sel)
        loss_history.append(epoch_loss / len(fit_x))

        if n_val:
            val_loss = _mean_loss(network, val_x, val_t, config.batch_size)
            val_history.append(val_loss)
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    log.info("early stop after epoch %d (val loss stale)", epoch + 1)
                    break

    return network, TrainResult(loss_history, val_history, len(loss_history))
