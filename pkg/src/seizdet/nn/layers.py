"""Network layers with hand-written reverse-mode gradients.

All layers consume NHWC (or flattened NxD) float64 batches. ``forward``
caches whatever the matching ``backward`` needs; ``backward`` consumes the
upstream gradient and returns the gradient w.r.t. the layer input while
populating parameter gradients in place.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class Layer:
    """Stateless base; parameterized layers override ``params``."""

    def params(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        """(name, value, gradient) triples; gradients are filled by backward."""
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, gy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def out_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        raise NotImplementedError

    def spec(self) -> dict:
        return {"type": self.kind}


class Conv2D(Layer):
    """Stride-1 cross-correlation with same (zero) padding; odd kernels only."""

    kind = "conv"

    def __init__(self, kh: int, kw: int, in_channels: int, out_channels: int):
        if kh % 2 == 0 or kw % 2 == 0:
            raise ValueError("kernel sizes must be odd for same padding")
        self.kh, self.kw = kh, kw
        self.in_channels, self.out_channels = in_channels, out_channels
        self.w = np.zeros((kh, kw, in_channels, out_channels))
        self.b = np.zeros(out_channels)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def params(self):
        return [("w", self.w, self.gw), ("b", self.b, self.gb)]

    def forward(self, x):
        if x.shape[-1] != self.in_channels:
            raise ValueError(f"expected {self.in_channels} input channels, got {x.shape[-1]}")
        self._x = np.ascontiguousarray(x)
        return kernels.conv2d_forward(self._x, self.w, self.b)

    def backward(self, gy):
        gx, gw, gb = kernels.conv2d_backward(self._x, self.w, np.ascontiguousarray(gy))
        self.gw[...] = gw
        self.gb[...] = gb
        return gx

    def out_shape(self, in_shape):
        h, w, _ = in_shape
        return (h, w, self.out_channels)

    def spec(self):
        return {
            "type": self.kind,
            "kh": self.kh,
            "kw": self.kw,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
        }


class MaxPool2(Layer):
    """2x2 max pooling, stride 2; odd trailing rows/columns are dropped.

    Backward routes each gradient to the window argmax only, with ties going
    to the first element in row-major window order.
    """

    kind = "pool"

    def __init__(self):
        self._idx = None
        self._in_hw = None

    def forward(self, x):
        if x.shape[1] < 2 or x.shape[2] < 2:
            raise ValueError("max pooling needs spatial dims >= 2")
        self._in_hw = (x.shape[1], x.shape[2])
        y, idx = kernels.maxpool2_forward(np.ascontiguousarray(x))
        self._idx = idx
        return y

    def backward(self, gy):
        h, w = self._in_hw
        return kernels.maxpool2_backward(np.ascontiguousarray(gy), self._idx, h, w)

    def out_shape(self, in_shape):
        h, w, c = in_shape
        return (h // 2, w // 2, c)


class ReLU(Layer):
    kind = "relu"

    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0  # subgradient at 0 is 0
        return np.where(self._mask, x, 0.0)

    def backward(self, gy):
        return np.where(self._mask, gy, 0.0)

    def out_shape(self, in_shape):
        return in_shape


class Flatten(Layer):
    kind = "flatten"

    def __init__(self):
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, gy):
        return gy.reshape(self._shape)

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)


class Dense(Layer):
    """Affine map y = x @ w + b on flattened inputs."""

    kind = "dense"

    def __init__(self, in_units: int, out_units: int):
        self.in_units, self.out_units = in_units, out_units
        self.w = np.zeros((in_units, out_units))
        self.b = np.zeros(out_units)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def params(self):
        return [("w", self.w, self.gw), ("b", self.b, self.gb)]

    def forward(self, x):
        if x.shape[-1] != self.in_units:
            raise ValueError(f"expected {self.in_units} input units, got {x.shape[-1]}")
        self._x = x
        return x @ self.w + self.b

    def backward(self, gy):
        self.gw[...] = self._x.T @ gy
        self.gb[...] = gy.sum(axis=0)
        return gy @ self.w.T

    def out_shape(self, in_shape):
        return (self.out_units,)

    def spec(self):
        return {"type": self.kind, "in_units": self.in_units, "out_units": self.out_units}


_LOG_FLOOR = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtracted softmax along the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(
    logits: np.ndarray, onehot: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-sample loss -sum(y log p), probabilities, and logit gradient p - y.

    Numerically stable for arbitrarily large logits; probabilities are
    floored at 1e-12 inside the log only.
    """
    logits = np.atleast_2d(logits)
    onehot = np.atleast_2d(onehot)
    if logits.shape != onehot.shape:
        raise ValueError(f"logits {logits.shape} and labels {onehot.shape} disagree")
    probs = softmax(logits)
    losses = -(onehot * np.log(np.maximum(probs, _LOG_FLOOR))).sum(axis=-1)
    return losses, probs, probs - onehot
