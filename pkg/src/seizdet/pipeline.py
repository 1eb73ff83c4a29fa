"""End-to-end glue: recordings -> patterns -> trained detector -> reports."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import dsp
from .container import PatternSet
from .evaluate import (
    EvalReport,
    RocCurve,
    TypeReport,
    auc,
    kfold_patient_split,
    one_vs_rest,
    optimal_cutoff,
    patient_specific_split,
    relabel_onset_window,
    roc_curve,
    score_report,
    undersample_balance,
)
from .features import (
    FAMILY_ORDER,
    PatternStats,
    build_family_pattern,
    normalize_patterns,
    stack_patterns,
)
from .ingest.labels import segment_epochs
from .ingest.types import AnnotationSet, Recording
from .nn.network import Network
from .nn.train import TrainConfig, TrainResult, train

log = logging.getLogger(__name__)


def canonical_families(families: Iterable[str]) -> tuple[str, ...]:
    """Deduplicate and order families into the fixed plv, energy, entropy order."""
    wanted = set(families)
    unknown = wanted - set(FAMILY_ORDER)
    if unknown:
        raise ValueError(f"unknown feature families {sorted(unknown)}")
    if not wanted:
        raise ValueError("at least one feature family is required")
    return tuple(f for f in FAMILY_ORDER if f in wanted)


def extract_patterns(
    recording: Recording,
    annotations: AnnotationSet,
    families: Iterable[str] = FAMILY_ORDER,
    *,
    bands: Sequence[tuple[float, float]] = dsp.DEFAULT_BANDS,
    num_taps: int = dsp.DEFAULT_NUM_TAPS,
    entropy_bins: int | None = None,
) -> PatternSet:
    """One stacked pattern matrix per 1-second epoch of a recording.

    Filtering and phase extraction run over the whole recording; the phase
    streams are then sliced into the same epochs as the raw samples.
    """
    families = canonical_families(families)
    epochs = segment_epochs(recording, annotations)
    spr = int(round(recording.sample_rate_hz))
    needs_phases = "plv" in families or "entropy" in families
    phases = (
        dsp.multiband_phases(recording.samples, recording.sample_rate_hz, bands, num_taps)
        if needs_phases
        else None
    )

    stacked = np.empty(
        (len(epochs), len(bands) * recording.n_channels, recording.n_channels * len(families)),
        dtype=np.float32,
    )
    for e in range(len(epochs)):
        sl = slice(e * spr, (e + 1) * spr)
        parts = []
        for family in families:
            if family == "energy":
                parts.append(
                    build_family_pattern(
                        epochs.windows[e],
                        "energy",
                        bands=bands,
                        sample_rate_hz=recording.sample_rate_hz,
                    )
                )
            else:
                parts.append(
                    build_family_pattern(
                        phases[:, :, sl], family, bands=bands, num_bins=entropy_bins
                    )
                )
        stacked[e] = stack_patterns(parts)

    return PatternSet(
        patterns=stacked,
        labels=epochs.labels,
        patient_ids=epochs.patient_ids,
        epoch_indices=epochs.epoch_indices,
        n_channels=recording.n_channels,
        families=families,
        n_bands=len(bands),
    )


def extract_cohort(
    recordings: Iterable[Recording],
    annotations: AnnotationSet,
    families: Iterable[str] = FAMILY_ORDER,
    *,
    bands: Sequence[tuple[float, float]] = dsp.DEFAULT_BANDS,
    num_taps: int = dsp.DEFAULT_NUM_TAPS,
    entropy_bins: int | None = None,
) -> PatternSet:
    """Extract and concatenate patterns for every labeled recording.

    Recordings whose patient is not mentioned in the annotation set are
    skipped with a warning and listed in the summary log line.
    """
    parts = []
    skipped = []
    for recording in recordings:
        if not annotations.has_patient(recording.patient_id):
            skipped.append(recording.patient_id)
            log.warning("no labels for patient %s; skipping recording", recording.patient_id)
            continue
        parts.append(
            extract_patterns(
                recording,
                annotations,
                families,
                bands=bands,
                num_taps=num_taps,
                entropy_bins=entropy_bins,
            )
        )
    if skipped:
        log.warning("extraction skipped %d unlabeled recording(s): %s", len(skipped), skipped)
    if not parts:
        raise ValueError("no labeled recordings to extract from")
    return PatternSet.concat(parts)


# ---------------------------------------------------------------------------
# detector training and scoring


@dataclass
class Detector:
    """A trained network plus the conditioning it expects at inference."""

    network: Network
    stats: PatternStats
    families: tuple[str, ...]
    architecture: str
    train_result: TrainResult


def train_detector(
    train_set: PatternSet,
    architecture: str = "CNN2",
    train_config: TrainConfig | None = None,
    balance_seed: int = 0,
    balance: bool = True,
) -> Detector:
    """Undersample to 50/50, fit normalization, train a fresh network."""
    cfg = train_config or TrainConfig()
    working = undersample_balance(train_set, balance_seed) if balance else train_set
    normalized, stats = normalize_patterns(working.patterns)
    binary = (np.asarray(working.labels) != 0).astype(np.int64)
    network = Network.build(architecture, normalized.shape[1:], seed=cfg.seed)
    _, result = train(network, normalized, binary, cfg)
    return Detector(
        network=network,
        stats=stats,
        families=train_set.families,
        architecture=architecture,
        train_result=result,
    )


def score_patterns(detector: Detector, pattern_set: PatternSet) -> np.ndarray:
    """Seizure-class probability per epoch."""
    normalized = detector.stats.apply(np.asarray(pattern_set.patterns, dtype=np.float64))
    return detector.network.predict_proba(normalized)[:, 1]


def evaluate_detector(detector: Detector, eval_set: PatternSet) -> tuple[EvalReport, RocCurve]:
    scores = score_patterns(detector, eval_set)
    binary = (np.asarray(eval_set.labels) != 0).astype(np.int64)
    report = score_report(scores, binary)
    return report, roc_curve(scores, binary)


def crossval_auc(
    pattern_set: PatternSet,
    architecture: str = "CNN2",
    train_config: TrainConfig | None = None,
    k: int = 10,
    seed: int = 0,
) -> list[float]:
    """Patient-wise k-fold cross-validation; one AUC per held-out fold."""
    folds = kfold_patient_split(pattern_set, k, seed)
    patients = np.asarray(pattern_set.patient_ids, dtype=object)
    aucs = []
    for f, held_out in enumerate(folds):
        mask = np.isin(patients, np.array(held_out, dtype=object))
        train_part = pattern_set.subset(np.nonzero(~mask)[0])
        val_part = pattern_set.subset(np.nonzero(mask)[0])
        fold_seed = int(np.random.SeedSequence([seed, f]).generate_state(1)[0])
        detector = train_detector(
            train_part, architecture, train_config, balance_seed=fold_seed
        )
        scores = score_patterns(detector, val_part)
        curve = roc_curve(scores, (np.asarray(val_part.labels) != 0).astype(np.int64))
        aucs.append(auc(curve))
        log.info("fold %d (%d patients held out): AUC %.4f", f, len(held_out), aucs[-1])
    return aucs


def per_type_reports(
    train_set: PatternSet,
    eval_set: PatternSet,
    architecture: str = "CNN2",
    train_config: TrainConfig | None = None,
    balance_seed: int = 0,
    types: Sequence[int] | None = None,
) -> list[TypeReport]:
    """One-vs-rest evaluation with a retrained detector per seizure type.

    Types default to those present in the evaluation labels. Epochs of
    other seizure types count as negatives, matching the one-vs-rest rule.
    """
    if types is None:
        types = sorted(int(t) for t in set(eval_set.labels.tolist()) if t != 0)
    reports = []
    for t in types:
        ovr_train = one_vs_rest(train_set, t)
        ovr_eval = one_vs_rest(eval_set, t)
        if ovr_train.labels.sum() == 0 or ovr_eval.labels.sum() == 0:
            log.warning("type %d missing from train or eval; skipping", t)
            continue
        detector = train_detector(ovr_train, architecture, train_config, balance_seed)
        scores = score_patterns(detector, ovr_eval)
        curve = roc_curve(scores, ovr_eval.labels)
        threshold, sensitivity, specificity = optimal_cutoff(curve)
        reports.append(
            TypeReport(
                seizure_type=t,
                auc=auc(curve),
                threshold=threshold,
                sensitivity=sensitivity,
                specificity=specificity,
                n_positive=int(ovr_eval.labels.sum()),
            )
        )
    return reports


def onset_subtask(
    train_set: PatternSet,
    eval_set: PatternSet,
    architecture: str = "CNN2",
    train_config: TrainConfig | None = None,
    balance_seed: int = 0,
    window_s: int = 10,
) -> EvalReport:
    """Seizure-onset detection: only the first ``window_s`` epochs of each
    seizure run stay positive, then the detector is retrained and evaluated."""
    relabeled_train = relabel_onset_window(train_set, window_s)
    relabeled_eval = relabel_onset_window(eval_set, window_s)
    detector = train_detector(relabeled_train, architecture, train_config, balance_seed)
    report, _ = evaluate_detector(detector, relabeled_eval)
    return report


def patient_specific_subtask(
    train_set: PatternSet,
    eval_set: PatternSet,
    architecture: str = "CNN2",
    train_config: TrainConfig | None = None,
    balance_seed: int = 0,
    fraction: float = 0.5,
) -> dict:
    """Compare a baseline detector with one whose training set is augmented
    by the chronological first half of each test patient's epochs.

    Both detectors are evaluated on the same reduced test set, so the AUCs
    are directly comparable.
    """
    augmentation, reduced = patient_specific_split(eval_set, fraction)
    baseline = train_detector(train_set, architecture, train_config, balance_seed)
    base_report, _ = evaluate_detector(baseline, reduced)
    combined = PatternSet.concat([train_set, augmentation])
    specific = train_detector(combined, architecture, train_config, balance_seed)
    specific_report, _ = evaluate_detector(specific, reduced)
    return {
        "fraction": fraction,
        "baseline": base_report.to_dict(),
        "patient_specific": specific_report.to_dict(),
    }


# ---------------------------------------------------------------------------
# sensitivity maps


def sensitivity_map(detector: Detector, pattern_set: PatternSet) -> np.ndarray:
    """Mean squared input gradient over the (normalized) evaluation patterns."""
    from .nn.diagnostics import input_sensitivity

    normalized = detector.stats.apply(np.asarray(pattern_set.patterns, dtype=np.float64))
    binary = (np.asarray(pattern_set.labels) != 0).astype(np.int64)
    return input_sensitivity(detector.network, normalized, binary)


def sensitivity_csv(
    sensitivity: np.ndarray,
    n_channels: int,
    families: Sequence[str],
    band_names: Sequence[str] = dsp.BAND_NAMES,
) -> str:
    """Row-major CSV with comments mapping rows to bands and columns to families."""
    lines = [
        "# input-sensitivity map: mean squared loss gradient per pattern entry",
        "# rows: "
        + "; ".join(
            f"{b * n_channels}-{(b + 1) * n_channels - 1}={name}"
            for b, name in enumerate(band_names)
        ),
        "# columns: "
        + "; ".join(
            f"{i * n_channels}-{(i + 1) * n_channels - 1}={fam}"
            for i, fam in enumerate(families)
        ),
    ]
    for row in sensitivity:
        lines.append(",".join(f"{v:.10g}" for v in row))
    return "\n".join(lines) + "\n"
