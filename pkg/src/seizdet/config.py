"""Declarative INI configuration for the command-line pipeline.

One file describes a whole experiment; sections: ``[paths]``, ``[features]``,
``[model]``, ``[train]``, ``[eval]``, ``[synth]``. Every key has a default,
so a missing file yields a runnable configuration. Command-line flags
override individual keys.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .features import FAMILY_ORDER
from .ingest.synth import CohortConfig
from .nn.network import ARCHITECTURE_NAMES
from .nn.train import TrainConfig


class ConfigError(ValueError):
    """Raised for unusable configuration values."""


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _scalar_or_bands(text: str):
    values = _floats(text)
    return values[0] if len(values) == 1 else values


@dataclass
class PipelineConfig:
    # paths
    recordings_dir: Path = Path("recordings")
    labels_csv: Path = Path("labels.csv")
    out_dir: Path = Path("out")
    patterns: Path | None = None
    eval_patterns: Path | None = None
    train_patterns: Path | None = None
    model: Path | None = None
    # features
    families: tuple[str, ...] = FAMILY_ORDER
    entropy_bins: int | None = None
    num_taps: int = 501
    channels: tuple[str, ...] | None = None
    patients: tuple[str, ...] | None = None
    resample_hz: float | None = None
    # model / training
    architecture: str = "CNN2"
    batch_size: int = 64
    epochs: int = 30
    train_seed: int = 0
    learning_rate: float = 1e-3
    val_fraction: float = 0.1
    patience: int = 5
    balance_seed: int = 0
    cv_folds: int = 0
    # evaluation subtask switches
    eval_per_type: bool = False
    onset_window_s: int = 0
    patient_split_fraction: float = 0.0
    # synthesis
    cohort: CohortConfig = field(default_factory=CohortConfig)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.train_seed,
            learning_rate=self.learning_rate,
            val_fraction=self.val_fraction,
            patience=self.patience,
        )

    def patterns_path(self) -> Path:
        return self.patterns if self.patterns is not None else self.out_dir / "patterns.szpt"

    def validate_common(self) -> None:
        if self.architecture not in ARCHITECTURE_NAMES:
            raise ConfigError(
                f"architecture {self.architecture!r} is not one of {ARCHITECTURE_NAMES}"
            )
        bad = [f for f in self.families if f not in FAMILY_ORDER]
        if bad:
            raise ConfigError(f"unknown feature families {bad}")
        if self.entropy_bins is not None and self.entropy_bins < 2:
            raise ConfigError("entropy_bins must be >= 2")
        if self.num_taps % 2 == 0 or self.num_taps < 3:
            raise ConfigError("num_taps must be odd and >= 3")
        if self.cv_folds < 0:
            raise ConfigError("cv_folds must be >= 0")
        if self.onset_window_s < 0:
            raise ConfigError("onset_window_s must be >= 0")
        if not 0.0 <= self.patient_split_fraction < 1.0:
            raise ConfigError("patient_split_fraction must lie in [0, 1)")
        try:
            self.train_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: Path | str | None) -> PipelineConfig:
    """Read an INI file into a PipelineConfig (defaults when path is None)."""
    cfg = PipelineConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc

    try:
        _apply_sections(cfg, cp)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc
    return cfg


def _apply_sections(cfg: PipelineConfig, cp: configparser.ConfigParser) -> None:
    if cp.has_section("paths"):
        sec = cp["paths"]
        for key in ("recordings_dir", "labels_csv", "out_dir"):
            if key in sec:
                setattr(cfg, key, Path(sec[key]))
        for key in ("patterns", "eval_patterns", "train_patterns", "model"):
            if key in sec:
                setattr(cfg, key, Path(sec[key]))

    if cp.has_section("features"):
        sec = cp["features"]
        if "families" in sec:
            cfg.families = tuple(f.strip() for f in sec["families"].split(",") if f.strip())
        if "entropy_bins" in sec:
            bins = int(sec["entropy_bins"])
            cfg.entropy_bins = bins if bins > 0 else None
        if "num_taps" in sec:
            cfg.num_taps = int(sec["num_taps"])
        if "channels" in sec:
            names = tuple(c.strip() for c in sec["channels"].split(",") if c.strip())
            cfg.channels = names or None
        if "patients" in sec:
            names = tuple(c.strip() for c in sec["patients"].split(",") if c.strip())
            cfg.patients = names or None
        if "resample_hz" in sec:
            value = float(sec["resample_hz"])
            cfg.resample_hz = value if value > 0 else None

    if cp.has_section("model") and "architecture" in cp["model"]:
        cfg.architecture = cp["model"]["architecture"].strip()

    if cp.has_section("train"):
        sec = cp["train"]
        cfg.batch_size = sec.getint("batch_size", cfg.batch_size)
        cfg.epochs = sec.getint("epochs", cfg.epochs)
        cfg.train_seed = sec.getint("seed", cfg.train_seed)
        cfg.learning_rate = sec.getfloat("learning_rate", cfg.learning_rate)
        cfg.val_fraction = sec.getfloat("val_fraction", cfg.val_fraction)
        cfg.patience = sec.getint("patience", cfg.patience)
        cfg.balance_seed = sec.getint("balance_seed", cfg.balance_seed)
        cfg.cv_folds = sec.getint("cv_folds", cfg.cv_folds)

    if cp.has_section("eval"):
        sec = cp["eval"]
        cfg.eval_per_type = sec.getboolean("per_type", cfg.eval_per_type)
        cfg.onset_window_s = sec.getint("onset_window_s", cfg.onset_window_s)
        cfg.patient_split_fraction = sec.getfloat(
            "patient_split_fraction", cfg.patient_split_fraction
        )

    if cp.has_section("synth"):
        sec = cp["synth"]
        kwargs = {}
        int_keys = {
            "n_patients": "patients",
            "n_channels": "channels",
            "seed": "seed",
            "seizures_per_patient": "seizures_per_patient",
        }
        for attr, key in int_keys.items():
            if key in sec:
                kwargs[attr] = sec.getint(key)
        float_keys = {
            "duration_s": "duration_s",
            "sample_rate_hz": "sample_rate_hz",
            "seizure_len_s": "seizure_len_s",
            "noise_amplitude": "noise_amplitude",
            "phase_noise": "phase_noise",
            "freq_jitter": "freq_jitter",
            "patient_freq_spread": "patient_freq_spread",
        }
        for attr, key in float_keys.items():
            if key in sec:
                kwargs[attr] = sec.getfloat(key)
        if "seizure_classes" in sec:
            kwargs["seizure_classes"] = tuple(int(x) for x in _floats(sec["seizure_classes"]))
        for attr in ("coupling_background", "coupling_seizure"):
            if attr in sec:
                kwargs[attr] = _scalar_or_bands(sec[attr])
        for attr in ("band_profile_background", "band_profile_seizure"):
            if attr in sec:
                kwargs[attr] = _floats(sec[attr])
        try:
            cfg.cohort = CohortConfig(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[synth] section: {exc}") from exc
