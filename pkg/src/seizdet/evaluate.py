"""ROC/AUC evaluation, rebalancing, and the patient-wise splitting protocols.

The set-level operations (undersampling, k-fold patient splits, one-vs-rest
relabeling, onset-window relabeling, patient-specific splits) work on any
carrier exposing ``labels``, ``patient_ids``, ``epoch_indices``, ``subset``
and ``with_labels`` — both :class:`~seizdet.ingest.EpochSet` and
:class:`~seizdet.container.PatternSet` qualify.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .ingest.types import BACKGROUND

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# score-level metrics


@dataclass
class RocCurve:
    """Threshold sweep of (false positive rate, true positive rate) points.

    Point k classifies score >= thresholds[k] as positive; the first point is
    (0, 0) with threshold +inf and equal scores are grouped into one step.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray


def roc_curve(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length 1-d arrays")
    positive = labels != 0
    n_pos = int(positive.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = positive[order]
    # Last index of each tie group of equal scores.
    boundary = np.nonzero(np.diff(sorted_scores))[0]
    last = np.concatenate([boundary, [len(scores) - 1]])
    tp = np.cumsum(sorted_pos)[last]
    fp = np.cumsum(~sorted_pos)[last]
    return RocCurve(
        fpr=np.concatenate([[0.0], fp / n_neg]),
        tpr=np.concatenate([[0.0], tp / n_pos]),
        thresholds=np.concatenate([[np.inf], sorted_scores[last]]),
    )


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve."""
    dx = np.diff(curve.fpr)
    mid = (curve.tpr[1:] + curve.tpr[:-1]) / 2.0
    return float(np.sum(dx * mid))


def optimal_cutoff(curve: RocCurve) -> tuple[float, float, float]:
    """Threshold maximizing sensitivity + specificity.

    Ties resolve to the lowest threshold, i.e. the most sensitive operating
    point among the maximizers.
    """
    j = curve.tpr + (1.0 - curve.fpr)
    best = j.max()
    candidates = np.nonzero(j >= best - 1e-12)[0]
    pick = candidates[-1]  # thresholds descend along the sweep
    return float(curve.thresholds[pick]), float(curve.tpr[pick]), float(1.0 - curve.fpr[pick])


# ---------------------------------------------------------------------------
# set-level protocols


def undersample_balance(epoch_set, seed: int = 0):
    """Randomly drop background epochs until classes are 50/50.

    Every seizure epoch is kept; the background subset is sampled without
    replacement under the seed. If seizures already outnumber background the
    set is returned unchanged with a warning.
    """
    labels = np.asarray(epoch_set.labels)
    pos_idx = np.nonzero(labels != BACKGROUND)[0]
    neg_idx = np.nonzero(labels == BACKGROUND)[0]
    if len(pos_idx) == 0 or len(neg_idx) == 0:
        raise ValueError("rebalancing needs both classes present")
    if len(pos_idx) > len(neg_idx):
        log.warning(
            "seizure epochs (%d) outnumber background (%d); leaving the set unchanged",
            len(pos_idx),
            len(neg_idx),
        )
        return epoch_set
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBA1A]))
    keep_neg = rng.choice(neg_idx, size=len(pos_idx), replace=False)
    keep = np.sort(np.concatenate([pos_idx, keep_neg]))
    return epoch_set.subset(keep)


def kfold_patient_split(epoch_set_or_ids, k: int, seed: int = 0) -> list[list[str]]:
    """Partition patients into k near-equal groups (sizes differ by <= 1)."""
    ids = getattr(epoch_set_or_ids, "patient_ids", epoch_set_or_ids)
    patients = sorted(set(np.asarray(ids, dtype=object).tolist()))
    if len(patients) < k:
        raise ValueError(f"cannot make {k} folds from {len(patients)} patients")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF01D]))
    order = rng.permutation(len(patients))
    shuffled = [patients[i] for i in order]
    base, extra = divmod(len(patients), k)
    folds = []
    start = 0
    for f in range(k):
        size = base + (1 if f < extra else 0)
        folds.append(sorted(shuffled[start : start + size]))
        start += size
    return folds


def one_vs_rest(epoch_set, seizure_type: int):
    """Binary relabeling: the chosen type is positive, everything else negative."""
    if seizure_type == BACKGROUND or not 1 <= seizure_type <= 8:
        raise ValueError(f"seizure_type must be 1..8, got {seizure_type}")
    labels = np.asarray(epoch_set.labels)
    binary = (labels == seizure_type).astype(np.int64)
    if binary.sum() == 0:
        log.warning("seizure type %d is absent; positive set is empty", seizure_type)
    return epoch_set.with_labels(binary)


def relabel_onset_window(epoch_set, window_s: int = 10):
    """Keep only the first ``window_s`` epochs of each seizure run positive.

    A run is a maximal set of consecutive epoch indices of one patient whose
    labels are non-background; epochs past the window become background.
    Never turns a background epoch positive.
    """
    labels = np.asarray(epoch_set.labels).copy()
    patients = np.asarray(epoch_set.patient_ids, dtype=object)
    indices = np.asarray(epoch_set.epoch_indices)

    order = np.lexsort((indices, np.array([str(p) for p in patients])))
    run_patient = None
    run_prev_index = None
    run_len = 0
    for pos in order:
        if labels[pos] == BACKGROUND:
            run_len = 0
            run_patient = None
            continue
        contiguous = (
            patients[pos] == run_patient
            and run_prev_index is not None
            and indices[pos] == run_prev_index + 1
            and run_len > 0
        )
        run_len = run_len + 1 if contiguous else 1
        run_patient = patients[pos]
        run_prev_index = indices[pos]
        if run_len > window_s:
            labels[pos] = BACKGROUND
    return epoch_set.with_labels(labels)


def patient_specific_split(epoch_set, fraction: float = 0.5):
    """Chronological per-patient split into (augmentation, reduced test) sets.

    For each patient the first floor(fraction * count) epochs move to the
    augmentation set; the rest stay as test. The outputs partition the input.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    patients = np.asarray(epoch_set.patient_ids, dtype=object)
    indices = np.asarray(epoch_set.epoch_indices)
    aug_mask = np.zeros(len(patients), dtype=bool)
    for patient in sorted(set(patients.tolist())):
        rows = np.nonzero(patients == patient)[0]
        rows = rows[np.argsort(indices[rows], kind="stable")]
        n_aug = int(fraction * len(rows))
        aug_mask[rows[:n_aug]] = True
    return epoch_set.subset(np.nonzero(aug_mask)[0]), epoch_set.subset(np.nonzero(~aug_mask)[0])


# ---------------------------------------------------------------------------
# reports


@dataclass
class TypeReport:
    seizure_type: int
    auc: float
    threshold: float
    sensitivity: float
    specificity: float
    n_positive: int

    def to_dict(self) -> dict:
        return {
            "seizure_type": self.seizure_type,
            "auc": self.auc,
            "threshold": self.threshold,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "n_positive": self.n_positive,
        }


@dataclass
class EvalReport:
    auc: float
    threshold: float
    sensitivity: float
    specificity: float
    confusion: dict
    n_epochs: int
    per_type: list[TypeReport] = field(default_factory=list)
    subtasks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "auc": self.auc,
            "threshold": self.threshold,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "confusion": self.confusion,
            "n_epochs": self.n_epochs,
            "per_type": [t.to_dict() for t in self.per_type],
        }
        if self.subtasks:
            out["subtasks"] = self.subtasks
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def score_report(scores: np.ndarray, labels: np.ndarray) -> EvalReport:
    """ROC-based report at the optimal cutoff (binary labels)."""
    labels = (np.asarray(labels) != 0).astype(np.int64)
    curve = roc_curve(scores, labels)
    area = auc(curve)
    threshold, sensitivity, specificity = optimal_cutoff(curve)
    predicted = np.asarray(scores) >= threshold
    actual = labels == 1
    confusion = {
        "tp": int(np.sum(predicted & actual)),
        "fp": int(np.sum(predicted & ~actual)),
        "fn": int(np.sum(~predicted & actual)),
        "tn": int(np.sum(~predicted & ~actual)),
    }
    return EvalReport(
        auc=area,
        threshold=threshold,
        sensitivity=sensitivity,
        specificity=specificity,
        confusion=confusion,
        n_epochs=len(labels),
    )


def roc_csv(curve: RocCurve) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["fpr", "tpr", "threshold"])
    for f, t, th in zip(curve.fpr, curve.tpr, curve.thresholds):
        writer.writerow([f"{f:.10g}", f"{t:.10g}", "inf" if np.isinf(th) else f"{th:.10g}"])
    return out.getvalue()


# ---------------------------------------------------------------------------
# feature distribution summaries


def feature_class_stats(pattern_set, num_bins: int = 64) -> list[dict]:
    """Per-family histograms of off-diagonal entries, split seizure vs background.

    Bins are uniform over the family's observed value range (shared by both
    classes so the histograms are comparable); counts sum to the number of
    contributing entries.
    """
    labels = np.asarray(pattern_set.labels)
    seizure = labels != BACKGROUND
    n = pattern_set.n_channels
    off_diag = ~np.eye(n, dtype=bool)
    block_mask = np.tile(off_diag, (pattern_set.n_bands, 1))

    rows = []
    for family in pattern_set.families:
        cols = pattern_set.family_columns(family)
        values = np.asarray(pattern_set.patterns[:, :, cols], dtype=np.float64)
        flat = {
            1: values[seizure][:, block_mask].ravel(),
            0: values[~seizure][:, block_mask].ravel(),
        }
        combined = values[:, block_mask]
        lo = float(combined.min()) if combined.size else 0.0
        hi = float(combined.max()) if combined.size else 1.0
        if lo == hi:
            hi = lo + 1.0
        edges = np.linspace(lo, hi, num_bins + 1)
        for cls in (0, 1):
            counts, _ = np.histogram(flat[cls], bins=edges)
            for b in range(num_bins):
                rows.append(
                    {
                        "family": family,
                        "class": cls,
                        "bin": b,
                        "bin_low": float(edges[b]),
                        "bin_high": float(edges[b + 1]),
                        "count": int(counts[b]),
                    }
                )
    return rows


def stats_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(
        out,
        fieldnames=["family", "class", "bin", "bin_low", "bin_high", "count"],
        lineterminator="\n",
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return out.getvalue()
