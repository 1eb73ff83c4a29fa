"""Network assembly, initialization and the four benchmark architectures.

All architectures share the same ingredients: 5x5 convolutions with 10
filters each, ReLU nonlinearities, 2x2 max pooling, a 1000-unit hidden
dense layer with ReLU, and a 2-way softmax readout:

* CNN1: conv - relu - pool - dense(1000) - relu - dense(2)
* CNN2: conv - relu - conv - relu - pool - dense(1000) - relu - dense(2)
* CNN3: conv - relu - pool - conv - relu - pool - dense(1000) - relu - dense(2)
* CNN4: conv - relu - conv - relu - pool - conv - relu - conv - relu - pool
        - dense(1000) - relu - dense(2)

Weights use fan-in-scaled uniform initialization with bound sqrt(6/fan_in);
the final dense layer starts at zero so an untrained network outputs the
uniform distribution.
"""

from __future__ import annotations

import numpy as np

from .layers import Conv2D, Dense, Flatten, Layer, MaxPool2, ReLU, softmax, softmax_cross_entropy

ARCHITECTURE_NAMES = ("CNN1", "CNN2", "CNN3", "CNN4")

_PLANS = {
    "CNN1": ("conv", "relu", "pool", "dense_hidden", "relu", "dense_out"),
    "CNN2": ("conv", "relu", "conv", "relu", "pool", "dense_hidden", "relu", "dense_out"),
    "CNN3": (
        "conv", "relu", "pool", "conv", "relu", "pool", "dense_hidden", "relu", "dense_out",
    ),
    "CNN4": (
        "conv", "relu", "conv", "relu", "pool", "conv", "relu", "conv", "relu", "pool",
        "dense_hidden", "relu", "dense_out",
    ),
}


class Network:
    """An ordered layer stack over single-channel 2-d pattern inputs."""

    def __init__(self, layers: list[Layer], input_shape: tuple[int, int], architecture: str = "custom"):
        self.layers = layers
        self.input_shape = tuple(input_shape)
        self.architecture = architecture

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        architecture: str,
        input_shape: tuple[int, int],
        seed: int = 0,
        conv_filters: int = 10,
        kernel_size: int = 5,
        dense_units: int = 1000,
        n_classes: int = 2,
    ) -> "Network":
        if architecture not in _PLANS:
            raise ValueError(
                f"unknown architecture {architecture!r}; expected one of {ARCHITECTURE_NAMES}"
            )
        h, w = input_shape
        shape = (h, w, 1)
        layers: list[Layer] = []
        for step in _PLANS[architecture]:
            if step == "conv":
                layer: Layer = Conv2D(kernel_size, kernel_size, shape[-1], conv_filters)
            elif step == "relu":
                layer = ReLU()
            elif step == "pool":
                layer = MaxPool2()
            elif step == "dense_hidden":
                layers.append(Flatten())
                shape = layers[-1].out_shape(shape)
                layer = Dense(shape[0], dense_units)
            else:  # dense_out
                layer = Dense(shape[0], n_classes)
            layers.append(layer)
            shape = layer.out_shape(shape)
        net = cls(layers, input_shape, architecture)
        net.initialize(seed)
        return net

    def initialize(self, seed: int, zero_final: bool = True) -> None:
        """Seeded fan-in uniform init; the last dense layer is zeroed unless told otherwise."""
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x1A17]))
        dense_layers = [l for l in self.layers if isinstance(l, Dense)]
        final = dense_layers[-1] if dense_layers else None
        for layer in self.layers:
            if isinstance(layer, Conv2D):
                fan_in = layer.kh * layer.kw * layer.in_channels
                bound = np.sqrt(6.0 / fan_in)
                layer.w[...] = rng.uniform(-bound, bound, layer.w.shape)
                layer.b[...] = 0.0
            elif isinstance(layer, Dense):
                if zero_final and layer is final:
                    layer.w[...] = 0.0
                    layer.b[...] = 0.0
                else:
                    bound = np.sqrt(6.0 / layer.in_units)
                    layer.w[...] = rng.uniform(-bound, bound, layer.w.shape)
                    layer.b[...] = 0.0

    # -- execution ---------------------------------------------------------

    def _as_batch(self, patterns: np.ndarray) -> np.ndarray:
        x = np.asarray(patterns, dtype=np.float64)
        if x.ndim == 2:
            x = x[None]
        if x.shape[1:] != self.input_shape:
            raise ValueError(f"pattern shape {x.shape[1:]} does not match {self.input_shape}")
        return x[..., None]  # single input channel

    def forward(self, patterns: np.ndarray) -> np.ndarray:
        """Logits for a batch of patterns (n, H, W) or one pattern (H, W)."""
        out = self._as_batch(patterns)
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def backward(self, glogits: np.ndarray) -> np.ndarray:
        """Backpropagate a logit gradient; returns the input gradient (n, H, W)."""
        g = glogits
        for layer in reversed(self.layers):
            g = layer.backward(g)
        return g[..., 0]

    def loss_and_grads(self, patterns: np.ndarray, onehot: np.ndarray) -> float:
        """Mean cross-entropy over the batch; parameter gradients are left in place."""
        logits = self.forward(patterns)
        losses, _, glogits = softmax_cross_entropy(logits, onehot)
        self.backward(glogits / len(losses))
        return float(losses.mean())

    def predict_proba(self, patterns: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Class probabilities, computed in batches; rows sum to 1."""
        x = np.asarray(patterns, dtype=np.float64)
        single = x.ndim == 2
        if single:
            x = x[None]
        chunks = [
            softmax(self.forward(x[i : i + batch_size]))
            for i in range(0, len(x), batch_size)
        ]
        probs = np.concatenate(chunks)
        return probs[0] if single else probs

    def input_gradient(self, patterns: np.ndarray, onehot: np.ndarray) -> np.ndarray:
        """Gradient of the summed cross-entropy w.r.t. each input entry."""
        logits = self.forward(patterns)
        _, _, glogits = softmax_cross_entropy(logits, np.atleast_2d(onehot))
        return self.backward(glogits)

    # -- bookkeeping --------------------------------------------------------

    def parameters(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        """Flat (qualified name, value, gradient) list in layer order."""
        out = []
        for i, layer in enumerate(self.layers):
            for name, value, grad in layer.params():
                out.append((f"layer{i}.{layer.kind}.{name}", value, grad))
        return out

    def n_parameters(self) -> int:
        return sum(v.size for _, v, _ in self.parameters())

    def layer_specs(self) -> list[dict]:
        return [layer.spec() for layer in self.layers]


def onehot(labels: np.ndarray, n_classes: int = 2) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= n_classes:
        raise ValueError(f"labels outside [0, {n_classes})")
    out = np.zeros((len(labels), n_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out
