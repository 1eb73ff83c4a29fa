"""Command-line front end.

Subcommands: ``synth``, ``extract``, ``train``, ``eval``, ``sensitivity``,
``stats``. Common flags: ``--config PATH``, ``--seed N``, ``--out DIR``
(flags override config keys). Exit codes: 0 success, 1 validation error,
2 I/O error. Set SEIZDET_LOG=debug|info|warning|error for log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .config import ConfigError, PipelineConfig, load_config
from .container import PatternSet, load_patterns, save_patterns
from .evaluate import feature_class_stats, roc_csv, stats_csv
from .features import PatternStats
from .ingest import (
    read_edf,
    synthesize_cohort,
    write_edf,
    write_labels,
)
from .ingest.labels import load_labels_file
from .ingest.types import AnnotationSet, LabelInterval
from .nn.model_io import load_model, save_model
from .pipeline import Detector

log = logging.getLogger("seizdet")


def _ensure_out_dir(cfg: PipelineConfig) -> Path:
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {cfg.out_dir}: {exc}") from exc
    if not os.access(cfg.out_dir, os.W_OK):
        raise OSError(f"output directory {cfg.out_dir} is not writable")
    return cfg.out_dir


def _load_recordings(cfg: PipelineConfig):
    if not cfg.recordings_dir.is_dir():
        raise ConfigError(f"recordings directory {cfg.recordings_dir} does not exist")
    paths = sorted(cfg.recordings_dir.glob("*.edf"))
    if not paths:
        raise ConfigError(f"recordings directory {cfg.recordings_dir} holds no .edf files")
    recordings = []
    for path in paths:
        recording = read_edf(path, resample_hz=cfg.resample_hz)
        if cfg.patients is not None and recording.patient_id not in cfg.patients:
            continue
        if cfg.channels is not None:
            recording = recording.pick_channels(cfg.channels)
        recordings.append(recording)
    if not recordings:
        raise ConfigError("no recordings left after applying the patient filter")
    return recordings


def _load_container(path: Path, what: str) -> PatternSet:
    if not path.is_file():
        raise ConfigError(f"{what} container {path} does not exist")
    return load_patterns(path)


def _load_detector(cfg: PipelineConfig) -> Detector:
    if cfg.model is None:
        cfg.model = cfg.out_dir / "model.json"
    if not cfg.model.is_file():
        raise ConfigError(f"model file {cfg.model} does not exist")
    network, stats, envelope = load_model(cfg.model)
    if stats is None:
        stats = PatternStats(
            mean=np.zeros(network.input_shape), std=np.ones(network.input_shape)
        )
    return Detector(
        network=network,
        stats=stats,
        families=tuple(envelope.get("feature_families", ())),
        architecture=envelope.get("architecture", "custom"),
        train_result=None,
    )


def _check_compat(detector: Detector, patterns: PatternSet, what: str) -> None:
    shape = (patterns.patterns.shape[1], patterns.patterns.shape[2])
    if shape != detector.network.input_shape:
        raise ConfigError(
            f"{what} patterns shaped {shape} do not match the model input "
            f"{detector.network.input_shape}"
        )
    if detector.families and tuple(detector.families) != patterns.families:
        raise ConfigError(
            f"{what} container families {patterns.families} do not match the "
            f"model's {tuple(detector.families)}"
        )


# ---------------------------------------------------------------------------
# commands


def cmd_synth(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    out = _ensure_out_dir(cfg)
    merged: dict[str, list[LabelInterval]] = {}
    count = 0
    for recording, annotations in synthesize_cohort(cfg.cohort):
        (out / f"{recording.patient_id}.edf").write_bytes(write_edf(recording))
        intervals = annotations.for_patient(recording.patient_id)
        if intervals:
            merged[recording.patient_id] = list(intervals)
        else:
            # Mention seizure-free patients explicitly so extraction does not
            # mistake them for unlabeled recordings.
            merged[recording.patient_id] = [
                LabelInterval(0.0, recording.duration_s, 0)
            ]
        count += 1
    labels_path = out / "labels.csv"
    labels_path.write_text(write_labels(AnnotationSet(merged)))
    print(f"synth: wrote {count} recordings and {labels_path}")
    return 0


def cmd_extract(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    if not cfg.labels_csv.is_file():
        raise ConfigError(f"labels file {cfg.labels_csv} does not exist")
    recordings = _load_recordings(cfg)
    annotations = load_labels_file(cfg.labels_csv)
    _ensure_out_dir(cfg)
    patterns = pipeline.extract_cohort(
        recordings,
        annotations,
        cfg.families,
        num_taps=cfg.num_taps,
        entropy_bins=cfg.entropy_bins,
    )
    path = cfg.patterns_path()
    save_patterns(path, patterns)
    print(
        f"extract: {len(patterns)} epochs from {len(recordings)} recordings, "
        f"pattern shape {patterns.height}x{patterns.width}, wrote {path}"
    )
    return 0


def _loss_history_csv(result) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["epoch", "train_loss", "val_loss"])
    for i, loss in enumerate(result.loss_history):
        val = result.val_history[i] if i < len(result.val_history) else ""
        writer.writerow([i + 1, f"{loss:.10g}", f"{val:.10g}" if val != "" else ""])
    return out.getvalue()


def cmd_train(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    patterns = _load_container(cfg.patterns_path(), "training")
    out = _ensure_out_dir(cfg)

    if cfg.cv_folds > 0:
        aucs = pipeline.crossval_auc(
            patterns,
            cfg.architecture,
            cfg.train_config(),
            k=cfg.cv_folds,
            seed=cfg.balance_seed,
        )
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["fold", "auc"])
        for i, a in enumerate(aucs):
            writer.writerow([i, f"{a:.10g}"])
        writer.writerow(["mean", f"{float(np.mean(aucs)):.10g}"])
        (out / "cv_aucs.csv").write_text(buf.getvalue())
        print(
            f"train: {cfg.cv_folds}-fold patient-wise CV mean AUC "
            f"{float(np.mean(aucs)):.4f}, wrote {out / 'cv_aucs.csv'}"
        )

    detector = pipeline.train_detector(
        patterns, cfg.architecture, cfg.train_config(), balance_seed=cfg.balance_seed
    )
    model_path = out / "model.json"
    save_model(
        model_path,
        detector.network,
        detector.stats,
        families=patterns.families,
        seed=cfg.train_seed,
    )
    (out / "loss_history.csv").write_text(_loss_history_csv(detector.train_result))
    print(
        f"train: {cfg.architecture} on {len(patterns)} epochs "
        f"({detector.train_result.epochs_run} epochs run), wrote {model_path}"
    )
    return 0


def cmd_eval(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    detector = _load_detector(cfg)
    eval_path = cfg.eval_patterns if cfg.eval_patterns is not None else cfg.patterns_path()
    eval_set = _load_container(eval_path, "evaluation")
    _check_compat(detector, eval_set, "evaluation")

    needs_train = cfg.eval_per_type or cfg.onset_window_s > 0 or cfg.patient_split_fraction > 0
    train_set = None
    if needs_train:
        if cfg.train_patterns is None:
            raise ConfigError(
                "the requested evaluation subtasks retrain the detector; "
                "set [paths] train_patterns"
            )
        train_set = _load_container(cfg.train_patterns, "training")
        _check_compat(detector, train_set, "training")

    out = _ensure_out_dir(cfg)
    report, curve = pipeline.evaluate_detector(detector, eval_set)

    if cfg.eval_per_type:
        report.per_type = pipeline.per_type_reports(
            train_set, eval_set, cfg.architecture, cfg.train_config(), cfg.balance_seed
        )
    if cfg.onset_window_s > 0:
        onset = pipeline.onset_subtask(
            train_set,
            eval_set,
            cfg.architecture,
            cfg.train_config(),
            cfg.balance_seed,
            window_s=cfg.onset_window_s,
        )
        report.subtasks["onset_window"] = {
            "window_s": cfg.onset_window_s,
            "report": onset.to_dict(),
        }
    if cfg.patient_split_fraction > 0:
        report.subtasks["patient_specific"] = pipeline.patient_specific_subtask(
            train_set,
            eval_set,
            cfg.architecture,
            cfg.train_config(),
            cfg.balance_seed,
            fraction=cfg.patient_split_fraction,
        )

    (out / "report.json").write_text(report.to_json())
    (out / "roc.csv").write_text(roc_csv(curve))
    print(
        f"eval: AUC {report.auc:.4f}, Se {report.sensitivity:.3f}, "
        f"Sp {report.specificity:.3f} on {report.n_epochs} epochs; wrote "
        f"{out / 'report.json'}"
    )
    return 0


def cmd_sensitivity(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    detector = _load_detector(cfg)
    patterns = _load_container(cfg.patterns_path(), "evaluation")
    _check_compat(detector, patterns, "evaluation")
    if len(patterns) == 0:
        raise ConfigError("evaluation container holds no epochs")
    out = _ensure_out_dir(cfg)
    sens = pipeline.sensitivity_map(detector, patterns)
    text = pipeline.sensitivity_csv(sens, patterns.n_channels, patterns.families)
    (out / "sensitivity.csv").write_text(text)
    print(f"sensitivity: wrote {out / 'sensitivity.csv'} ({sens.shape[0]}x{sens.shape[1]})")
    return 0


def cmd_stats(cfg: PipelineConfig) -> int:
    cfg.validate_common()
    patterns = _load_container(cfg.patterns_path(), "pattern")
    out = _ensure_out_dir(cfg)
    rows = feature_class_stats(patterns)
    (out / "feature_stats.csv").write_text(stats_csv(rows))
    print(f"stats: wrote {out / 'feature_stats.csv'} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------


_COMMANDS = {
    "synth": cmd_synth,
    "extract": cmd_extract,
    "train": cmd_train,
    "eval": cmd_eval,
    "sensitivity": cmd_sensitivity,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seizdet",
        description="EEG seizure detection pipeline: synchronization patterns + CNN",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", type=Path, default=None, help="INI configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the command's seed")
        p.add_argument("--out", type=Path, default=None, help="override the output directory")
        if name in ("eval", "sensitivity"):
            p.add_argument("--model", type=Path, default=None, help="model JSON path")
        if name == "eval":
            p.add_argument("--patterns", type=Path, default=None, help="evaluation container")
            p.add_argument(
                "--onset-window",
                type=int,
                default=None,
                help="enable the onset subtask with this window (seconds)",
            )
            p.add_argument(
                "--patient-split",
                type=float,
                default=None,
                help="enable the patient-specific subtask with this fraction",
            )
            p.add_argument(
                "--per-type", action="store_true", help="per-seizure-type one-vs-rest reports"
            )
    return parser


def _apply_overrides(cfg: PipelineConfig, args: argparse.Namespace) -> None:
    if args.out is not None:
        cfg.out_dir = args.out
    if args.seed is not None:
        if args.command == "synth":
            cfg.cohort.seed = args.seed
        elif args.command == "train":
            cfg.train_seed = args.seed
        else:
            cfg.balance_seed = args.seed
    if getattr(args, "model", None) is not None:
        cfg.model = args.model
    if getattr(args, "patterns", None) is not None:
        cfg.eval_patterns = args.patterns
    if getattr(args, "onset_window", None) is not None:
        cfg.onset_window_s = args.onset_window
    if getattr(args, "patient_split", None) is not None:
        cfg.patient_split_fraction = args.patient_split
    if getattr(args, "per_type", False):
        cfg.eval_per_type = True


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("SEIZDET_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_overrides(cfg, args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
