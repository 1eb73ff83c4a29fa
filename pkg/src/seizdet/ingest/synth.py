"""Ground-truth EEG synthesis from coupled phase oscillators.

Each channel carries one latent base phase driven by its own natural
frequency plus Brownian phase noise. During seizure intervals a shared
drive pulls every channel's phase derivative toward a common stream with
per-band coupling strength c in [0, 1]:

    increment_i <- (1 - c) * own_i + c * shared

The per-band waveform is sin of the base phase scaled to the band's center
frequency, weighted by a per-state amplitude profile, plus white measurement
noise. Closed forms at the extremes: c = 1 gives constant relative phases
(pairwise phase-locking value 1), c = 0 gives independently drifting phases
(locking decays toward 0 with window length).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dsp import DEFAULT_BANDS
from .types import ALL_CLASS_CODES, BACKGROUND, AnnotationSet, LabelInterval, Recording

N_BANDS = len(DEFAULT_BANDS)

#: Band-center frequency ratios relative to a 1 Hz base oscillator.
BAND_CENTERS_HZ = tuple((lo + hi) / 2.0 for lo, hi in DEFAULT_BANDS)

_DEFAULT_PROFILE_BACKGROUND = (1.0, 0.85, 0.7, 0.4, 0.35, 0.2, 0.12)
_DEFAULT_PROFILE_SEIZURE = (0.9, 0.8, 0.78, 0.5, 0.55, 0.45, 0.3)


def _as_band_vector(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(N_BANDS, float(arr))
    if arr.shape != (N_BANDS,):
        raise ValueError(f"{name} must be a scalar or {N_BANDS} values, got shape {arr.shape}")
    return arr


@dataclass
class SynthConfig:
    """Parameters for one synthetic patient recording."""

    patient_id: str = "p000"
    n_channels: int = 10
    duration_s: float = 60.0
    sample_rate_hz: float = 250.0
    seed: int = 0
    #: (start_s, end_s, class) triples; class defaults to 1 when omitted.
    seizure_intervals: tuple = ()
    coupling_background: float | tuple = 0.1
    coupling_seizure: float | tuple = 0.9
    band_profile_background: tuple = _DEFAULT_PROFILE_BACKGROUND
    band_profile_seizure: tuple = _DEFAULT_PROFILE_SEIZURE
    noise_amplitude: float = 0.3
    phase_noise: float = 2.0
    base_freq_hz: float = 1.0
    freq_jitter: float = 0.03

    def __post_init__(self) -> None:
        if self.n_channels < 2:
            raise ValueError("need at least 2 channels")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        normalized = []
        for item in self.seizure_intervals:
            if len(item) == 2:
                start, end, cls = item[0], item[1], 1
            else:
                start, end, cls = item
            if cls == BACKGROUND or cls not in ALL_CLASS_CODES:
                raise ValueError(f"seizure interval class must be 1..8, got {cls}")
            if not 0 <= start < end <= self.duration_s:
                raise ValueError(f"interval [{start}, {end}] outside [0, {self.duration_s}]")
            normalized.append((float(start), float(end), int(cls)))
        normalized.sort()
        for (s0, e0, _), (s1, e1, _) in zip(normalized, normalized[1:]):
            if s1 < e0:
                raise ValueError(f"seizure intervals [{s0},{e0}] and [{s1},{e1}] overlap")
        self.seizure_intervals = tuple(normalized)
        for name in ("coupling_background", "coupling_seizure"):
            vec = _as_band_vector(getattr(self, name), name)
            if np.any(vec < 0) or np.any(vec > 1):
                raise ValueError(f"{name} must lie in [0, 1]")
            setattr(self, name, tuple(vec))
        self.band_profile_background = tuple(
            _as_band_vector(self.band_profile_background, "band_profile_background")
        )
        self.band_profile_seizure = tuple(
            _as_band_vector(self.band_profile_seizure, "band_profile_seizure")
        )


def synthesize_recording(config: SynthConfig) -> tuple[Recording, AnnotationSet]:
    """Generate one recording plus the annotation set matching the config.

    Deterministic: a fixed seed reproduces the sample stream byte for byte.
    """
    fs = config.sample_rate_hz
    n = config.n_channels
    t_total = int(round(config.duration_s * fs))
    dt = 1.0 / fs

    rng = np.random.default_rng(config.seed)
    freqs = config.base_freq_hz * rng.uniform(
        1.0 - config.freq_jitter, 1.0 + config.freq_jitter, size=n
    )
    init_phases = rng.uniform(0.0, 2.0 * np.pi, size=n + 1)
    phase_noise = config.phase_noise * np.sqrt(dt) * rng.standard_normal((n + 1, t_total))
    white = rng.standard_normal((n, t_total))

    own_inc = 2.0 * np.pi * freqs[:, None] * dt + phase_noise[:n]
    shared_inc = 2.0 * np.pi * config.base_freq_hz * dt + phase_noise[n]

    seizing = np.zeros(t_total, dtype=bool)
    for start, end, _ in config.seizure_intervals:
        seizing[int(round(start * fs)) : int(round(end * fs))] = True

    c_bg = np.asarray(config.coupling_background)
    c_sz = np.asarray(config.coupling_seizure)
    amp_bg = np.asarray(config.band_profile_background)
    amp_sz = np.asarray(config.band_profile_seizure)

    signal = np.zeros((n, t_total))
    for b, center in enumerate(BAND_CENTERS_HZ):
        c_t = np.where(seizing, c_sz[b], c_bg[b])
        blended = own_inc * (1.0 - c_t) + shared_inc * c_t
        ratio = center / config.base_freq_hz
        theta = ratio * (init_phases[:n, None] + np.cumsum(blended, axis=1))
        amp_t = np.where(seizing, amp_sz[b], amp_bg[b])
        signal += amp_t * np.sin(theta)
    signal += config.noise_amplitude * white

    recording = Recording(
        patient_id=config.patient_id,
        sample_rate_hz=fs,
        channels=[f"ch{i:02d}" for i in range(n)],
        samples=signal,
    )
    intervals = [LabelInterval(s, e, cls) for s, e, cls in config.seizure_intervals]
    annotations = AnnotationSet({config.patient_id: intervals} if intervals else {})
    return recording, annotations


@dataclass
class CohortConfig:
    """A cohort of synthetic patients sharing one generation recipe."""

    n_patients: int = 4
    n_channels: int = 10
    duration_s: float = 60.0
    sample_rate_hz: float = 250.0
    seed: int = 0
    seizures_per_patient: int = 1
    seizure_len_s: float = 10.0
    seizure_classes: tuple = (1,)
    coupling_background: float | tuple = 0.1
    coupling_seizure: float | tuple = 0.9
    band_profile_background: tuple = _DEFAULT_PROFILE_BACKGROUND
    band_profile_seizure: tuple = _DEFAULT_PROFILE_SEIZURE
    noise_amplitude: float = 0.3
    phase_noise: float = 2.0
    freq_jitter: float = 0.03
    #: Per-patient base-frequency factor drawn from U[1-s, 1+s]; models
    #: patient idiosyncrasy so patient-specific training has something to gain.
    patient_freq_spread: float = 0.0

    def __post_init__(self) -> None:
        if self.n_patients < 1:
            raise ValueError("n_patients must be >= 1")
        if self.seizures_per_patient < 0:
            raise ValueError("seizures_per_patient must be >= 0")
        span = self.duration_s / max(1, self.seizures_per_patient)
        if self.seizures_per_patient and self.seizure_len_s > span - 2.0:
            raise ValueError(
                f"{self.seizures_per_patient} seizures of {self.seizure_len_s} s "
                f"do not fit into {self.duration_s} s with margins"
            )


def _patient_seed(cohort_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([cohort_seed, index]).generate_state(1)[0])


def patient_configs(cohort: CohortConfig) -> list[SynthConfig]:
    """Expand a cohort recipe into per-patient configs (deterministic)."""
    rng = np.random.default_rng(np.random.SeedSequence([cohort.seed, 0x5EED]))
    base_factors = rng.uniform(
        1.0 - cohort.patient_freq_spread,
        1.0 + cohort.patient_freq_spread,
        size=cohort.n_patients,
    )
    configs = []
    for i in range(cohort.n_patients):
        intervals = []
        k = cohort.seizures_per_patient
        for j in range(k):
            center = (j + 0.5) * cohort.duration_s / k
            start = center - cohort.seizure_len_s / 2.0
            cls = cohort.seizure_classes[j % len(cohort.seizure_classes)]
            intervals.append((start, start + cohort.seizure_len_s, cls))
        configs.append(
            SynthConfig(
                patient_id=f"p{i:03d}",
                n_channels=cohort.n_channels,
                duration_s=cohort.duration_s,
                sample_rate_hz=cohort.sample_rate_hz,
                seed=_patient_seed(cohort.seed, i),
                seizure_intervals=tuple(intervals),
                coupling_background=cohort.coupling_background,
                coupling_seizure=cohort.coupling_seizure,
                band_profile_background=cohort.band_profile_background,
                band_profile_seizure=cohort.band_profile_seizure,
                noise_amplitude=cohort.noise_amplitude,
                phase_noise=cohort.phase_noise,
                base_freq_hz=float(base_factors[i]),
                freq_jitter=cohort.freq_jitter,
            )
        )
    return configs


def synthesize_cohort(cohort: CohortConfig):
    """Yield (Recording, AnnotationSet) per patient."""
    for config in patient_configs(cohort):
        yield synthesize_recording(config)
