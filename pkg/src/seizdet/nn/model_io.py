"""Model persistence: JSON envelope plus a flat binary of float32 tensors.

The JSON file records the architecture, layer specs, input shape, feature
family order, seed and the byte offset/shape of every tensor in the sidecar
``.bin`` (row-major little-endian float32). Normalization statistics are
stored as two extra tensors so inference applies exactly the training
conditioning.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..features import PatternStats
from .layers import Conv2D, Dense, Flatten, MaxPool2, ReLU
from .network import Network

FORMAT_VERSION = 1

_LAYER_TYPES = {
    "conv": lambda spec: Conv2D(spec["kh"], spec["kw"], spec["in_channels"], spec["out_channels"]),
    "pool": lambda spec: MaxPool2(),
    "relu": lambda spec: ReLU(),
    "flatten": lambda spec: Flatten(),
    "dense": lambda spec: Dense(spec["in_units"], spec["out_units"]),
}


class ModelFormatError(ValueError):
    """Raised when a model file pair is inconsistent or unreadable."""


def save_model(
    json_path,
    network: Network,
    stats: PatternStats | None = None,
    families: tuple[str, ...] = (),
    seed: int = 0,
) -> None:
    """Write ``json_path`` and its ``.bin`` sidecar; byte-deterministic."""
    json_path = Path(json_path)
    bin_path = json_path.with_suffix(".bin")

    blobs: list[bytes] = []
    offset = 0
    tensors = []

    def add_tensor(name: str, value: np.ndarray) -> None:
        nonlocal offset
        raw = np.ascontiguousarray(value, dtype="<f4").tobytes()
        tensors.append({"name": name, "shape": list(value.shape), "offset": offset})
        blobs.append(raw)
        offset += len(raw)

    for name, value, _ in network.parameters():
        add_tensor(name, value)
    if stats is not None:
        add_tensor("normalization.mean", stats.mean)
        add_tensor("normalization.std", stats.std)

    envelope = {
        "format_version": FORMAT_VERSION,
        "architecture": network.architecture,
        "input_shape": list(network.input_shape),
        "feature_families": list(families),
        "seed": seed,
        "layers": network.layer_specs(),
        "tensors": tensors,
        "bin_file": bin_path.name,
        "has_normalization": stats is not None,
    }
    with open(json_path, "w") as fh:
        json.dump(envelope, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    with open(bin_path, "wb") as fh:
        fh.write(b"".join(blobs))


def load_model(json_path) -> tuple[Network, PatternStats | None, dict]:
    """Rebuild a network (and its normalization stats) from a model file pair."""
    json_path = Path(json_path)
    try:
        with open(json_path) as fh:
            envelope = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{json_path}: not valid JSON ({exc})") from exc
    if envelope.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format {envelope.get('format_version')!r}")

    bin_path = json_path.parent / envelope["bin_file"]
    raw = bin_path.read_bytes()

    layers = []
    for spec in envelope["layers"]:
        kind = spec.get("type")
        if kind not in _LAYER_TYPES:
            raise ModelFormatError(f"unknown layer type {kind!r}")
        layers.append(_LAYER_TYPES[kind](spec))
    network = Network(layers, tuple(envelope["input_shape"]), envelope["architecture"])

    by_name = {}
    for entry in envelope["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        start = entry["offset"]
        end = start + 4 * count
        if end > len(raw):
            raise ModelFormatError(f"tensor {entry['name']!r} extends past the binary sidecar")
        by_name[entry["name"]] = (
            np.frombuffer(raw, dtype="<f4", count=count, offset=start)
            .reshape(shape)
            .astype(np.float64)
        )

    for name, value, _ in network.parameters():
        if name not in by_name:
            raise ModelFormatError(f"missing tensor {name!r} in model file")
        stored = by_name[name]
        if stored.shape != value.shape:
            raise ModelFormatError(
                f"tensor {name!r} stored as {stored.shape}, layer expects {value.shape}"
            )
        value[...] = stored

    stats = None
    if envelope.get("has_normalization"):
        for key in ("normalization.mean", "normalization.std"):
            if key not in by_name:
                raise ModelFormatError(f"missing tensor {key!r} in model file")
        stats = PatternStats(
            mean=by_name["normalization.mean"], std=by_name["normalization.std"]
        )
        if stats.mean.shape != tuple(envelope["input_shape"]):
            raise ModelFormatError("normalization statistics do not match the input shape")
    return network, stats, envelope
