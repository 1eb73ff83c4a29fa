"""Label CSV parsing and epoch segmentation.

The label sidecar is a CSV with header ``patient_id,start_s,end_s,class``
where ``class`` is 0 for background or 1..8 for the seizure types. Time not
covered by any row is implicitly background; a patient mentioned nowhere in
the file is treated as unlabeled by the extraction pipeline.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .types import ALL_CLASS_CODES, BACKGROUND, AnnotationSet, EpochSet, LabelInterval, Recording

_EXPECTED_HEADER = ["patient_id", "start_s", "end_s", "class"]


class LabelFormatError(ValueError):
    """Raised for malformed or inconsistent label CSV content."""


def load_labels(csv_text: str) -> AnnotationSet:
    """Parse label CSV text into a validated :class:`AnnotationSet`.

    Raises :class:`LabelFormatError` on unknown class codes or overlapping
    intervals (the error names both offending rows).
    """
    reader = csv.reader(io.StringIO(csv_text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        return AnnotationSet({})
    header = [cell.strip() for cell in rows[0]]
    if header != _EXPECTED_HEADER:
        raise LabelFormatError(
            f"expected header {','.join(_EXPECTED_HEADER)!r}, got {','.join(header)!r}"
        )

    per_patient: dict[str, list[tuple[int, LabelInterval]]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise LabelFormatError(f"row {lineno}: expected 4 columns, got {len(row)}")
        patient = row[0].strip()
        try:
            start_s = float(row[1])
            end_s = float(row[2])
        except ValueError as exc:
            raise LabelFormatError(f"row {lineno}: start/end must be numbers") from exc
        if not (math.isfinite(start_s) and math.isfinite(end_s)) or start_s < 0:
            raise LabelFormatError(f"row {lineno}: start/end out of range")
        if not start_s < end_s:
            raise LabelFormatError(f"row {lineno}: start {start_s} must precede end {end_s}")
        try:
            label = int(row[3])
        except ValueError as exc:
            raise LabelFormatError(f"row {lineno}: class must be an integer") from exc
        if label not in ALL_CLASS_CODES:
            raise LabelFormatError(
                f"row {lineno}: unknown class code {label} (allowed 0..8)"
            )
        per_patient.setdefault(patient, []).append(
            (lineno, LabelInterval(start_s, end_s, label))
        )

    intervals: dict[str, list[LabelInterval]] = {}
    for patient, tagged in per_patient.items():
        tagged.sort(key=lambda item: item[1].start_s)
        for (row_a, iv_a), (row_b, iv_b) in zip(tagged, tagged[1:]):
            if iv_b.start_s < iv_a.end_s:
                raise LabelFormatError(
                    f"patient {patient!r}: row {row_a} [{iv_a.start_s}, {iv_a.end_s}] "
                    f"overlaps row {row_b} [{iv_b.start_s}, {iv_b.end_s}]"
                )
        intervals[patient] = [iv for _, iv in tagged]
    return AnnotationSet(intervals)


def load_labels_file(path) -> AnnotationSet:
    with open(path, "r", newline="") as fh:
        return load_labels(fh.read())


def write_labels(annotations: AnnotationSet) -> str:
    """Serialize an AnnotationSet back to CSV text (patients in sorted order)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_EXPECTED_HEADER)
    for patient in annotations.patients():
        for iv in annotations.for_patient(patient):
            writer.writerow([patient, f"{iv.start_s:g}", f"{iv.end_s:g}", iv.label])
    return out.getvalue()


def _majority_label(coverage: dict[int, float]) -> int:
    # Largest coverage wins; a tie (within 1 ns) goes to the seizure class,
    # and between tied seizure classes to the smallest code.
    best = max(coverage.values())
    tied = [code for code, cov in coverage.items() if cov >= best - 1e-9]
    seizure = [code for code in tied if code != BACKGROUND]
    if seizure:
        return min(seizure)
    return BACKGROUND


def segment_epochs(recording: Recording, annotations: AnnotationSet) -> EpochSet:
    """Cut a recording into consecutive non-overlapping 1-second epochs.

    The trailing partial second is discarded. Each epoch is labeled by the
    class covering the majority of its interval; an exact 50/50 split between
    seizure and background resolves to seizure.
    """
    fs = recording.sample_rate_hz
    spr = int(round(fs))
    if abs(spr - fs) > 1e-9:
        raise ValueError("segmentation requires an integer per-second sample count")
    n_epochs = recording.n_samples // spr
    if n_epochs < 1:
        raise ValueError(
            f"recording of {recording.duration_s:.3f} s is shorter than one epoch"
        )

    labels = np.empty(n_epochs, dtype=np.int64)
    for e in range(n_epochs):
        cover = annotations.coverage(recording.patient_id, float(e), float(e + 1))
        labels[e] = _majority_label(cover)

    windows = recording.samples[:, : n_epochs * spr]
    windows = windows.reshape(recording.n_channels, n_epochs, spr).transpose(1, 0, 2)
    return EpochSet(
        windows=np.ascontiguousarray(windows),
        labels=labels,
        patient_ids=np.array([recording.patient_id] * n_epochs, dtype=object),
        epoch_indices=np.arange(n_epochs, dtype=np.int64),
        sample_rate_hz=fs,
        channels=list(recording.channels),
    )
