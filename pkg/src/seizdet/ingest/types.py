"""Core data carriers for EEG recordings, annotations and labeled epochs."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

BACKGROUND = 0

#: Seizure class codes and their clinical names. 0 is reserved for background.
SEIZURE_CLASS_NAMES = {
    1: "focal_nonspecific",
    2: "generalized_nonspecific",
    3: "simple_partial",
    4: "complex_partial",
    5: "absence",
    6: "tonic",
    7: "clonic",
    8: "tonic_clonic",
}

ALL_CLASS_CODES = frozenset({BACKGROUND} | set(SEIZURE_CLASS_NAMES))


@dataclass
class Recording:
    """Multichannel sampled EEG in physical units (microvolts).

    ``samples`` has shape (n_channels, n_samples); every channel shares one
    sample rate.
    """

    patient_id: str
    sample_rate_hz: float
    channels: list[str]
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2-d (channels x time) array")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if len(self.channels) != self.samples.shape[0]:
            raise ValueError(
                f"channel labels ({len(self.channels)}) do not match "
                f"sample rows ({self.samples.shape[0]})"
            )
        if self.samples.shape[0] < 1:
            raise ValueError("a recording needs at least 1 channel")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.samples.shape[1] / self.sample_rate_hz

    def pick_channels(self, labels: Sequence[str]) -> "Recording":
        """Return a copy restricted to ``labels``, in the given order."""
        index = {name: i for i, name in enumerate(self.channels)}
        missing = [name for name in labels if name not in index]
        if missing:
            raise KeyError(f"channels not present in recording: {missing}")
        rows = [index[name] for name in labels]
        return replace(self, channels=list(labels), samples=self.samples[rows])


@dataclass(frozen=True)
class LabelInterval:
    start_s: float
    end_s: float
    label: int

    def __post_init__(self) -> None:
        if not self.start_s < self.end_s:
            raise ValueError(f"interval start {self.start_s} must precede end {self.end_s}")
        if self.label not in ALL_CLASS_CODES:
            raise ValueError(f"unknown class code {self.label}")


@dataclass
class AnnotationSet:
    """Per-patient label intervals; time not covered by any interval is background."""

    intervals: dict[str, list[LabelInterval]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for patient, spans in self.intervals.items():
            spans.sort(key=lambda iv: iv.start_s)
            for prev, cur in zip(spans, spans[1:]):
                if cur.start_s < prev.end_s:
                    raise ValueError(
                        f"patient {patient!r}: interval [{cur.start_s}, {cur.end_s}] "
                        f"overlaps [{prev.start_s}, {prev.end_s}]"
                    )

    def patients(self) -> list[str]:
        return sorted(self.intervals)

    def has_patient(self, patient_id: str) -> bool:
        return patient_id in self.intervals

    def for_patient(self, patient_id: str) -> list[LabelInterval]:
        return self.intervals.get(patient_id, [])

    def coverage(self, patient_id: str, start_s: float, end_s: float) -> dict[int, float]:
        """Seconds of each class code within [start_s, end_s); the remainder is background."""
        cover: dict[int, float] = {}
        for iv in self.for_patient(patient_id):
            overlap = min(iv.end_s, end_s) - max(iv.start_s, start_s)
            if overlap > 0:
                cover[iv.label] = cover.get(iv.label, 0.0) + overlap
        explicit = sum(cover.values())
        cover[BACKGROUND] = cover.get(BACKGROUND, 0.0) + max(0.0, (end_s - start_s) - explicit)
        return cover


@dataclass
class EpochSet:
    """Consecutive non-overlapping 1-second windows with one class label each.

    Parallel arrays: ``windows`` is (n_epochs, n_channels, samples_per_epoch),
    ``labels`` holds class codes, ``patient_ids``/``epoch_indices`` keep the
    provenance needed for patient-wise splitting and onset relabeling.
    """

    windows: np.ndarray
    labels: np.ndarray
    patient_ids: np.ndarray
    epoch_indices: np.ndarray
    sample_rate_hz: float
    channels: list[str]

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.patient_ids = np.asarray(self.patient_ids, dtype=object)
        self.epoch_indices = np.asarray(self.epoch_indices, dtype=np.int64)
        n = len(self.windows)
        if not (len(self.labels) == len(self.patient_ids) == len(self.epoch_indices) == n):
            raise ValueError("parallel epoch arrays disagree in length")

    def __len__(self) -> int:
        return len(self.windows)

    def subset(self, idx) -> "EpochSet":
        idx = np.asarray(idx)
        return EpochSet(
            windows=self.windows[idx],
            labels=self.labels[idx],
            patient_ids=self.patient_ids[idx],
            epoch_indices=self.epoch_indices[idx],
            sample_rate_hz=self.sample_rate_hz,
            channels=self.channels,
        )

    def with_labels(self, labels: np.ndarray) -> "EpochSet":
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != len(self):
            raise ValueError("label array length mismatch")
        return EpochSet(
            windows=self.windows,
            labels=labels,
            patient_ids=self.patient_ids,
            epoch_indices=self.epoch_indices,
            sample_rate_hz=self.sample_rate_hz,
            channels=self.channels,
        )

    @staticmethod
    def concat(parts: Iterable["EpochSet"]) -> "EpochSet":
        parts = list(parts)
        if not parts:
            raise ValueError("nothing to concatenate")
        first = parts[0]
        for p in parts[1:]:
            if p.sample_rate_hz != first.sample_rate_hz:
                raise ValueError("sample rates differ between epoch sets")
            if p.windows.shape[1:] != first.windows.shape[1:]:
                raise ValueError("window shapes differ between epoch sets")
        return EpochSet(
            windows=np.concatenate([p.windows for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
            patient_ids=np.concatenate([p.patient_ids for p in parts]),
            epoch_indices=np.concatenate([p.epoch_indices for p in parts]),
            sample_rate_hz=first.sample_rate_hz,
            channels=first.channels,
        )
