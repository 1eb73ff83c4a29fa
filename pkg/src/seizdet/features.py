"""Synchronization and power features assembled into per-epoch pattern images.

For one 1-second epoch of an n-channel recording, each feature family
produces seven symmetric n x n blocks (one per frequency band) stacked
vertically into a (7n) x n matrix:

* ``plv``     magnitude of the time-averaged unit phasor of the pairwise
              relative phase; 1 = locked, 0 = no consistent relationship.
* ``energy``  log mean band power of the pairwise channel-difference signal
              (diagonal: the channel's own band power).
* ``entropy`` normalized Shannon-entropy deficit of the relative-phase
              histogram; 1 = fully locked, 0 = uniform phase spread.

Families are concatenated side by side in the fixed order above, so an
n = 10 recording yields 70x10 per family and 70x30 for all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dsp import DEFAULT_BANDS, _LOG_FLOOR

#: Canonical left-to-right stacking order of feature families.
FAMILY_ORDER = ("plv", "energy", "entropy")

_TWO_PI = 2.0 * np.pi


def relative_phases(phase_i: np.ndarray, phase_j: np.ndarray) -> np.ndarray:
    """Elementwise phase difference wrapped into (-pi, pi]."""
    phase_i = np.asarray(phase_i, dtype=np.float64)
    phase_j = np.asarray(phase_j, dtype=np.float64)
    if phase_i.shape != phase_j.shape:
        raise ValueError(f"phase series shapes differ: {phase_i.shape} vs {phase_j.shape}")
    return _wrap(phase_i - phase_j)


def _wrap(delta: np.ndarray) -> np.ndarray:
    wrapped = np.mod(delta, _TWO_PI)
    return np.where(wrapped > np.pi, wrapped - _TWO_PI, wrapped)


def plv(series: np.ndarray) -> float:
    """Phase locking value |mean(exp(i * phi))| of a relative-phase series."""
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        raise ValueError("phase locking value of an empty series is undefined")
    return float(np.abs(np.mean(np.exp(1j * series))))


def default_bin_count(n_samples: int) -> int:
    """Histogram bin count heuristic K = floor(exp(0.626 + 0.4 ln(N - 1)))."""
    if n_samples < 2:
        raise ValueError("bin count heuristic needs at least 2 samples")
    return int(math.floor(math.exp(0.626 + 0.4 * math.log(n_samples - 1))))


def _bin_indices(series: np.ndarray, num_bins: int) -> np.ndarray:
    # Uniform partition of (-pi, pi]; the shared helper keeps scalar and
    # vectorized entropy paths bit-identical.
    width = _TWO_PI / num_bins
    idx = np.floor((series + np.pi) / width).astype(np.int64)
    return np.clip(idx, 0, num_bins - 1)


def phase_entropy_rho(series: np.ndarray, num_bins: int | None = None) -> float:
    """Entropy synchronization index rho = (S_max - S) / S_max in [0, 1].

    S is the Shannon entropy of the relative-phase histogram over
    ``num_bins`` uniform bins of (-pi, pi] (0 ln 0 := 0), S_max = ln K.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        raise ValueError("entropy of an empty series is undefined")
    if num_bins is None:
        num_bins = default_bin_count(series.size)
    if num_bins < 2:
        raise ValueError("num_bins must be >= 2")
    counts = np.bincount(_bin_indices(series.ravel(), num_bins), minlength=num_bins)
    return float(_rho_from_counts(counts[None, :], series.size)[0])


def _rho_from_counts(counts: np.ndarray, n: int) -> np.ndarray:
    k = counts.shape[-1]
    p = counts / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, p * np.log(p), 0.0)
    entropy = -terms.sum(axis=-1)
    s_max = math.log(k)
    return (s_max - entropy) / s_max


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _band_log_power_rows(rows: np.ndarray, sample_rate_hz: float, bands) -> np.ndarray:
    """Band log power for many equal-length signals at once: (M, n_bands)."""
    n = rows.shape[-1]
    power = np.abs(np.fft.rfft(rows, axis=-1)) ** 2 / n
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate_hz)
    out = np.empty((rows.shape[0], len(bands)))
    for b, (low, high) in enumerate(bands):
        mask = (freqs >= low) & (freqs < high)
        if not np.any(mask):
            raise ValueError(
                f"band ({low}, {high}) Hz contains no spectral bins at this resolution"
            )
        out[:, b] = np.log(power[:, mask].mean(axis=-1) + _LOG_FLOOR)
    return out


def build_family_pattern(
    data: np.ndarray,
    family: str,
    *,
    bands: Sequence[tuple[float, float]] = DEFAULT_BANDS,
    sample_rate_hz: float = 250.0,
    num_bins: int | None = None,
) -> np.ndarray:
    """Assemble one family's stacked band blocks for a single epoch.

    ``data`` is (n_bands, n_channels, t) instantaneous phases for ``plv`` and
    ``entropy``, or the raw (n_channels, t) epoch for ``energy``. Each band
    block is symmetric by construction: the feature is computed once per
    unordered pair and mirrored. Diagonals hold the self-pair convention:
    1 for plv/entropy (perfect self synchrony), the channel's own band log
    power for energy.
    """
    if family not in FAMILY_ORDER:
        raise ValueError(f"unknown feature family {family!r}; expected one of {FAMILY_ORDER}")
    data = np.asarray(data, dtype=np.float64)

    if family == "energy":
        if data.ndim != 2:
            raise ValueError("energy patterns need a (channels, samples) epoch")
        n, t = data.shape
        if n < 2:
            raise ValueError("patterns need at least 2 channels")
        ii, jj = _pair_indices(n)
        rows = np.concatenate([data[ii] - data[jj], data], axis=0)
        blp = _band_log_power_rows(rows, sample_rate_hz, bands)
        pair_vals = blp[: len(ii)]
        diag_vals = blp[len(ii) :]
        blocks = np.empty((len(bands), n, n))
        for b in range(len(bands)):
            blocks[b][ii, jj] = pair_vals[:, b]
            blocks[b][jj, ii] = pair_vals[:, b]
            np.fill_diagonal(blocks[b], diag_vals[:, b])
        return blocks.reshape(len(bands) * n, n)

    if data.ndim != 3:
        raise ValueError(f"{family} patterns need (bands, channels, samples) phases")
    n_bands, n, t = data.shape
    if n_bands != len(bands):
        raise ValueError(f"phase data has {n_bands} bands, band set has {len(bands)}")
    if n < 2:
        raise ValueError("patterns need at least 2 channels")
    ii, jj = _pair_indices(n)
    rel = _wrap(data[:, ii, :] - data[:, jj, :])  # (bands, pairs, t)

    if family == "plv":
        vals = np.abs(np.mean(np.exp(1j * rel), axis=-1))
        diag = 1.0
    else:
        k = num_bins if num_bins is not None else default_bin_count(t)
        if k < 2:
            raise ValueError("num_bins must be >= 2")
        idx = _bin_indices(rel, k).reshape(n_bands * len(ii), t)
        offsets = np.arange(idx.shape[0], dtype=np.int64)[:, None] * k
        counts = np.bincount(
            (idx + offsets).ravel(), minlength=idx.shape[0] * k
        ).reshape(idx.shape[0], k)
        vals = _rho_from_counts(counts, t).reshape(n_bands, len(ii))
        diag = 1.0

    blocks = np.empty((n_bands, n, n))
    for b in range(n_bands):
        blocks[b][ii, jj] = vals[b]
        blocks[b][jj, ii] = vals[b]
        np.fill_diagonal(blocks[b], diag)
    return blocks.reshape(n_bands * n, n)


def stack_patterns(patterns: Sequence[np.ndarray]) -> np.ndarray:
    """Concatenate same-shape family patterns side by side."""
    if not patterns:
        raise ValueError("nothing to stack")
    shape = patterns[0].shape
    for p in patterns[1:]:
        if p.shape != shape:
            raise ValueError(f"pattern shapes differ: {p.shape} vs {shape}")
    return np.concatenate(patterns, axis=1)


@dataclass
class PatternStats:
    """Per-entry normalization statistics fitted on a training set."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, patterns: np.ndarray) -> np.ndarray:
        return (patterns - self.mean) / self.std


_STD_FLOOR = 1e-8


def normalize_patterns(
    patterns: np.ndarray, stats: PatternStats | None = None
) -> tuple[np.ndarray, PatternStats]:
    """Per-entry z-score over the epoch axis.

    With ``stats`` given (inference path) they are applied as-is; otherwise
    mean/std are fitted from the data, with the std floored at 1e-8 before
    storing so constant entries map to 0. Applying fitted stats to a second
    set, or twice in a row, is deliberately not idempotent.
    """
    patterns = np.asarray(patterns, dtype=np.float64)
    if patterns.ndim != 3 or len(patterns) == 0:
        raise ValueError("expected a nonempty (epochs, height, width) array")
    if stats is None:
        mean = patterns.mean(axis=0)
        std = np.maximum(patterns.std(axis=0), _STD_FLOOR)
        stats = PatternStats(mean=mean, std=std)
    return stats.apply(patterns), stats
