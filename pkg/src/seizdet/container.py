"""Flat binary container for labeled pattern sets.

Byte layout (all integers little-endian):

====== ======================= =========================================
offset field                   notes
====== ======================= =========================================
0      magic ``SZPT`` (4s)
4      version (u16)           currently 1
6      n_channels (u16)
8      n_families (u16)
10     n_bands (u16)
12     n_epochs (u32)
16     height (u32)            n_bands * n_channels
20     width (u32)             n_channels * n_families
24     family codes (u8 each)  0 = plv, 1 = energy, 2 = entropy
..     patterns                n_epochs * height * width float32, row-major
..     labels                  n_epochs bytes (class codes 0..8)
..     patient table           u32 count, then u16 length + UTF-8 id each
..     epoch metadata          per epoch: u32 patient index, u32 epoch index
====== ======================= =========================================
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .features import FAMILY_ORDER

MAGIC = b"SZPT"
VERSION = 1

_FAMILY_CODES = {name: i for i, name in enumerate(FAMILY_ORDER)}
_CODE_FAMILIES = {i: name for name, i in _FAMILY_CODES.items()}


class ContainerFormatError(ValueError):
    """Raised when pattern container bytes are malformed."""


@dataclass
class PatternSet:
    """Labeled per-epoch pattern matrices with patient/epoch provenance."""

    patterns: np.ndarray  # (n_epochs, height, width) float32
    labels: np.ndarray  # (n_epochs,) class codes
    patient_ids: np.ndarray  # (n_epochs,) object
    epoch_indices: np.ndarray  # (n_epochs,)
    n_channels: int
    families: tuple[str, ...]
    n_bands: int = 7

    def __post_init__(self) -> None:
        self.patterns = np.asarray(self.patterns, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.patient_ids = np.asarray(self.patient_ids, dtype=object)
        self.epoch_indices = np.asarray(self.epoch_indices, dtype=np.int64)
        self.families = tuple(self.families)
        unknown = [f for f in self.families if f not in _FAMILY_CODES]
        if unknown:
            raise ValueError(f"unknown feature families {unknown}")
        expected = (self.n_bands * self.n_channels, self.n_channels * len(self.families))
        if self.patterns.ndim != 3 or self.patterns.shape[1:] != expected:
            raise ValueError(
                f"patterns shaped {self.patterns.shape}, expected (*, {expected[0]}, {expected[1]})"
            )
        n = len(self.patterns)
        if not (len(self.labels) == len(self.patient_ids) == len(self.epoch_indices) == n):
            raise ValueError("parallel pattern arrays disagree in length")

    def __len__(self) -> int:
        return len(self.patterns)

    @property
    def height(self) -> int:
        return self.n_bands * self.n_channels

    @property
    def width(self) -> int:
        return self.n_channels * len(self.families)

    def family_columns(self, family: str) -> slice:
        """Column span of one family inside the stacked pattern."""
        if family not in self.families:
            raise KeyError(f"family {family!r} not in this set {self.families}")
        pos = self.families.index(family)
        return slice(pos * self.n_channels, (pos + 1) * self.n_channels)

    def subset(self, idx) -> "PatternSet":
        idx = np.asarray(idx)
        return PatternSet(
            patterns=self.patterns[idx],
            labels=self.labels[idx],
            patient_ids=self.patient_ids[idx],
            epoch_indices=self.epoch_indices[idx],
            n_channels=self.n_channels,
            families=self.families,
            n_bands=self.n_bands,
        )

    def with_labels(self, labels: np.ndarray) -> "PatternSet":
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != len(self):
            raise ValueError("label array length mismatch")
        return PatternSet(
            patterns=self.patterns,
            labels=labels,
            patient_ids=self.patient_ids,
            epoch_indices=self.epoch_indices,
            n_channels=self.n_channels,
            families=self.families,
            n_bands=self.n_bands,
        )

    @staticmethod
    def concat(parts) -> "PatternSet":
        parts = list(parts)
        if not parts:
            raise ValueError("nothing to concatenate")
        first = parts[0]
        for p in parts[1:]:
            if (p.n_channels, p.families, p.n_bands) != (
                first.n_channels,
                first.families,
                first.n_bands,
            ):
                raise ValueError("pattern sets have incompatible layouts")
        return PatternSet(
            patterns=np.concatenate([p.patterns for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
            patient_ids=np.concatenate([p.patient_ids for p in parts]),
            epoch_indices=np.concatenate([p.epoch_indices for p in parts]),
            n_channels=first.n_channels,
            families=first.families,
            n_bands=first.n_bands,
        )


def dump_patterns(pattern_set: PatternSet) -> bytes:
    """Serialize a PatternSet to container bytes."""
    ps = pattern_set
    head = struct.pack(
        "<4sHHHHIII",
        MAGIC,
        VERSION,
        ps.n_channels,
        len(ps.families),
        ps.n_bands,
        len(ps),
        ps.height,
        ps.width,
    )
    codes = bytes(_FAMILY_CODES[f] for f in ps.families)
    body = np.ascontiguousarray(ps.patterns, dtype="<f4").tobytes()
    labels = ps.labels.astype(np.uint8).tobytes()

    patients = sorted(set(ps.patient_ids.tolist()))
    index = {p: i for i, p in enumerate(patients)}
    table = [struct.pack("<I", len(patients))]
    for p in patients:
        encoded = p.encode("utf-8")
        table.append(struct.pack("<H", len(encoded)) + encoded)
    meta = np.empty((len(ps), 2), dtype="<u4")
    meta[:, 0] = [index[p] for p in ps.patient_ids.tolist()]
    meta[:, 1] = ps.epoch_indices
    return head + codes + body + labels + b"".join(table) + meta.tobytes()


def parse_patterns(data: bytes) -> PatternSet:
    """Deserialize container bytes back into a PatternSet."""
    head_size = struct.calcsize("<4sHHHHIII")
    if len(data) < head_size:
        raise ContainerFormatError("container shorter than its fixed header")
    magic, version, n_channels, n_families, n_bands, n_epochs, height, width = struct.unpack(
        "<4sHHHHIII", data[:head_size]
    )
    if magic != MAGIC:
        raise ContainerFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ContainerFormatError(f"unsupported container version {version}")
    if height != n_bands * n_channels or width != n_channels * n_families:
        raise ContainerFormatError("header dimensions are inconsistent")

    pos = head_size
    codes = data[pos : pos + n_families]
    if len(codes) < n_families:
        raise ContainerFormatError("truncated family code block")
    try:
        families = tuple(_CODE_FAMILIES[c] for c in codes)
    except KeyError as exc:
        raise ContainerFormatError(f"unknown family code {exc}") from exc
    pos += n_families

    n_values = n_epochs * height * width
    need = n_values * 4
    if len(data) < pos + need:
        raise ContainerFormatError("truncated pattern block")
    patterns = np.frombuffer(data, dtype="<f4", count=n_values, offset=pos)
    patterns = patterns.reshape(n_epochs, height, width).copy()
    pos += need

    if len(data) < pos + n_epochs:
        raise ContainerFormatError("truncated label block")
    labels = np.frombuffer(data, dtype=np.uint8, count=n_epochs, offset=pos).astype(np.int64)
    pos += n_epochs

    if len(data) < pos + 4:
        raise ContainerFormatError("truncated patient table")
    (n_patients,) = struct.unpack_from("<I", data, pos)
    pos += 4
    patients = []
    for _ in range(n_patients):
        if len(data) < pos + 2:
            raise ContainerFormatError("truncated patient table entry")
        (length,) = struct.unpack_from("<H", data, pos)
        pos += 2
        raw = data[pos : pos + length]
        if len(raw) < length:
            raise ContainerFormatError("truncated patient id")
        patients.append(raw.decode("utf-8"))
        pos += length

    need = n_epochs * 8
    if len(data) < pos + need:
        raise ContainerFormatError("truncated epoch metadata")
    meta = np.frombuffer(data, dtype="<u4", count=n_epochs * 2, offset=pos).reshape(n_epochs, 2)
    if n_epochs and meta[:, 0].max(initial=0) >= max(n_patients, 1):
        raise ContainerFormatError("epoch metadata references a missing patient")
    patient_ids = np.array([patients[i] for i in meta[:, 0]], dtype=object)

    return PatternSet(
        patterns=patterns,
        labels=labels,
        patient_ids=patient_ids,
        epoch_indices=meta[:, 1].astype(np.int64),
        n_channels=n_channels,
        families=families,
        n_bands=n_bands,
    )


def save_patterns(path, pattern_set: PatternSet) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_patterns(pattern_set))


def load_patterns(path) -> PatternSet:
    with open(path, "rb") as fh:
        return parse_patterns(fh.read())
