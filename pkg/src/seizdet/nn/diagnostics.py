"""Gradient verification and input-sensitivity maps."""

from __future__ import annotations

import numpy as np

from .layers import softmax_cross_entropy
from .network import Network, onehot


def grad_check(
    network: Network,
    sample: np.ndarray,
    label: int = 0,
    step: float = 1e-4,
    entries_per_tensor: int = 200,
    seed: int = 0,
    randomize: bool = True,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Checks up to ``entries_per_tensor`` randomly chosen entries of every
    parameter tensor. With ``randomize`` the parameters are first drawn from
    a nonzero seeded distribution (the training initializer zeroes the final
    dense layer, which would make every upstream gradient vanish and the
    check vacuous). Relative error uses denominator max(|a|, |n|, 1e-3), so
    near-zero gradient entries are compared on an absolute scale.
    """
    if randomize:
        network.initialize(seed, zero_final=False)
    x = np.asarray(sample, dtype=np.float64)
    target = onehot(np.array([label]))

    def loss() -> float:
        logits = network.forward(x)
        losses, _, _ = softmax_cross_entropy(logits, target)
        return float(losses.sum())

    # One backward pass gives every analytic gradient at once.
    logits = network.forward(x)
    _, _, glogits = softmax_cross_entropy(logits, target)
    network.backward(glogits)
    analytic = [(value, grad.copy()) for _, value, grad in network.parameters()]

    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x6C]))
    worst = 0.0
    for value, grad in analytic:
        flat = value.reshape(-1)
        n_check = min(entries_per_tensor, flat.size)
        chosen = rng.choice(flat.size, size=n_check, replace=False)
        for idx in chosen:
            original = flat[idx]
            flat[idx] = original + step
            plus = loss()
            flat[idx] = original - step
            minus = loss()
            flat[idx] = original
            numeric = (plus - minus) / (2.0 * step)
            a = grad.reshape(-1)[idx]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-3)
            worst = max(worst, err)
    return worst


def input_sensitivity(
    network: Network, patterns: np.ndarray, labels: np.ndarray, batch_size: int = 256
) -> np.ndarray:
    """Mean squared loss gradient w.r.t. each input entry, over all samples.

    High values mark pattern entries the classifier reacts to; the map has
    the shape of one pattern and is everywhere nonnegative.
    """
    patterns = np.asarray(patterns, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(patterns) == 0:
        raise ValueError("sensitivity map of an empty pattern set is undefined")
    if patterns.ndim != 3:
        raise ValueError("expected a (n, height, width) pattern array")
    total = np.zeros(patterns.shape[1:])
    for i in range(0, len(patterns), batch_size):
        chunk = patterns[i : i + batch_size]
        grads = network.input_gradient(chunk, onehot(labels[i : i + batch_size]))
        total += np.sum(grads**2, axis=0)
    return total / len(patterns)
