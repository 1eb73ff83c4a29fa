"""Minimal EDF (European Data Format) reader and writer.

Only plain EDF is handled: a 256-byte fixed-width ASCII header, one
256-byte ASCII block per signal, then data records of 16-bit little-endian
two's-complement samples. Digital values are mapped to physical units with
the per-signal linear calibration

    physical = physical_min + (digital - digital_min) * gain,
    gain     = (physical_max - physical_min) / (digital_max - digital_min).

Annotation channels (EDF+) are not interpreted; labels live in a sidecar
CSV handled by :mod:`seizdet.ingest.labels`.
"""

from __future__ import annotations

import math

import numpy as np

from .types import Recording


class EdfFormatError(ValueError):
    """Raised when a byte stream is not parseable as EDF."""


# Static header layout: (field name, offset, length).
_HEADER_FIELDS = [
    ("version", 0, 8),
    ("patient_id", 8, 80),
    ("recording_id", 88, 80),
    ("start_date", 168, 8),
    ("start_time", 176, 8),
    ("header_bytes", 184, 8),
    ("reserved", 192, 44),
    ("n_records", 236, 8),
    ("record_duration_s", 244, 8),
    ("n_signals", 252, 4),
]

# Per-signal blocks, in file order: (field name, width per signal).
_SIGNAL_FIELDS = [
    ("label", 16),
    ("transducer", 80),
    ("physical_dim", 8),
    ("physical_min", 8),
    ("physical_max", 8),
    ("digital_min", 8),
    ("digital_max", 8),
    ("prefilter", 80),
    ("samples_per_record", 8),
    ("signal_reserved", 32),
]

_FIXED_HEADER_LEN = 256
_PER_SIGNAL_LEN = 256


def _ascii_field(data: bytes, name: str, offset: int, length: int) -> str:
    chunk = data[offset : offset + length]
    if len(chunk) < length:
        raise EdfFormatError(f"field {name!r} at byte {offset}: stream too short")
    try:
        return chunk.decode("ascii")
    except UnicodeDecodeError as exc:
        raise EdfFormatError(f"field {name!r} at byte {offset}: non-ASCII bytes") from exc


def _int_field(data: bytes, name: str, offset: int, length: int) -> int:
    raw = _ascii_field(data, name, offset, length).strip()
    try:
        return int(raw)
    except ValueError as exc:
        raise EdfFormatError(f"field {name!r} at byte {offset}: not an integer ({raw!r})") from exc


def _float_field(data: bytes, name: str, offset: int, length: int) -> float:
    raw = _ascii_field(data, name, offset, length).strip()
    try:
        value = float(raw)
    except ValueError as exc:
        raise EdfFormatError(f"field {name!r} at byte {offset}: not a number ({raw!r})") from exc
    if not math.isfinite(value):
        raise EdfFormatError(f"field {name!r} at byte {offset}: non-finite value")
    return value


def parse_edf(data: bytes, resample_hz: float | None = None) -> Recording:
    """Decode EDF bytes into a physical-unit :class:`Recording`.

    Signals with differing per-signal sample rates are rejected unless
    ``resample_hz`` is given, in which case every signal is linearly
    interpolated onto that rate.
    """
    if len(data) < _FIXED_HEADER_LEN:
        raise EdfFormatError(
            f"field 'version' at byte 0: stream holds {len(data)} bytes, "
            f"EDF header needs {_FIXED_HEADER_LEN}"
        )

    fields: dict[str, str] = {}
    for name, offset, length in _HEADER_FIELDS:
        fields[name] = _ascii_field(data, name, offset, length)

    header_bytes = _int_field(data, "header_bytes", 184, 8)
    n_records = _int_field(data, "n_records", 236, 8)
    record_duration_s = _float_field(data, "record_duration_s", 244, 8)
    n_signals = _int_field(data, "n_signals", 252, 4)
    if n_signals <= 0:
        raise EdfFormatError(f"field 'n_signals' at byte 252: must be positive, got {n_signals}")
    if record_duration_s <= 0:
        raise EdfFormatError("field 'record_duration_s' at byte 244: must be positive")

    expected_header = _FIXED_HEADER_LEN + n_signals * _PER_SIGNAL_LEN
    if header_bytes != expected_header:
        raise EdfFormatError(
            f"field 'header_bytes' at byte 184: {header_bytes} does not match "
            f"{expected_header} for {n_signals} signals"
        )
    if len(data) < expected_header:
        raise EdfFormatError("field 'label' at byte 256: stream ends inside signal headers")

    def signal_block(field: str, converter, width: int, base: int):
        out = []
        for s in range(n_signals):
            offset = base + s * width
            out.append(converter(data, f"{field}[{s}]", offset, width))
        return out

    base = _FIXED_HEADER_LEN
    labels = None
    per_signal: dict[str, list] = {}
    for name, width in _SIGNAL_FIELDS:
        if name in ("physical_min", "physical_max"):
            per_signal[name] = signal_block(name, _float_field, width, base)
        elif name in ("digital_min", "digital_max", "samples_per_record"):
            per_signal[name] = signal_block(name, _int_field, width, base)
        else:
            per_signal[name] = signal_block(name, _ascii_field, width, base)
        base += n_signals * width
    labels = [x.strip() for x in per_signal["label"]]

    spr = per_signal["samples_per_record"]
    if any(s <= 0 for s in spr):
        raise EdfFormatError("field 'samples_per_record': every signal needs at least 1 sample")
    record_size = 2 * sum(spr)
    body = len(data) - expected_header
    if n_records < 0:
        # Unknown record count ("-1"): infer from the byte count.
        n_records = body // record_size
    if body < n_records * record_size:
        raise EdfFormatError(
            f"truncated data record: body holds {body} bytes, "
            f"{n_records} records need {n_records * record_size}"
        )

    gains = []
    offsets = []
    for s in range(n_signals):
        dmin, dmax = per_signal["digital_min"][s], per_signal["digital_max"][s]
        pmin, pmax = per_signal["physical_min"][s], per_signal["physical_max"][s]
        if dmin == dmax:
            raise EdfFormatError(
                f"signal {s} ({labels[s]!r}): digital_min equals digital_max ({dmin})"
            )
        gain = (pmax - pmin) / (dmax - dmin)
        gains.append(gain)
        offsets.append(pmin - gain * dmin)

    raw = np.frombuffer(data, dtype="<i2", offset=expected_header, count=n_records * sum(spr))
    raw = raw.reshape(n_records, sum(spr))
    signals = []
    col = 0
    for s in range(n_signals):
        dig = raw[:, col : col + spr[s]].reshape(-1).astype(np.float64)
        signals.append(dig * gains[s] + offsets[s])
        col += spr[s]

    rates = [spr[s] / record_duration_s for s in range(n_signals)]
    if len(set(rates)) > 1:
        if resample_hz is None:
            raise EdfFormatError(
                f"signals carry mixed sample rates {sorted(set(rates))}; "
                "pass resample_hz to interpolate onto one rate"
            )
        duration = n_records * record_duration_s
        n_out = int(round(duration * resample_hz))
        t_out = np.arange(n_out) / resample_hz
        signals = [
            np.interp(t_out, np.arange(len(sig)) / rate, sig)
            for sig, rate in zip(signals, rates)
        ]
        rate = float(resample_hz)
    else:
        rate = rates[0]
        if resample_hz is not None and resample_hz != rate:
            duration = n_records * record_duration_s
            n_out = int(round(duration * resample_hz))
            t_out = np.arange(n_out) / resample_hz
            signals = [np.interp(t_out, np.arange(len(s)) / rate, s) for s in signals]
            rate = float(resample_hz)

    return Recording(
        patient_id=fields["patient_id"].strip(),
        sample_rate_hz=rate,
        channels=labels,
        samples=np.stack(signals),
    )


def read_edf(path, resample_hz: float | None = None) -> Recording:
    with open(path, "rb") as fh:
        return parse_edf(fh.read(), resample_hz=resample_hz)


def _pad_ascii(value: str, width: int, name: str) -> bytes:
    encoded = value.encode("ascii")
    if len(encoded) > width:
        raise ValueError(f"{name} {value!r} exceeds {width} ASCII bytes")
    return encoded.ljust(width)


def _fit_number(value: float, width: int) -> str:
    """Shortest-loss decimal rendering of value within ``width`` characters."""
    for precision in range(10, 0, -1):
        text = f"{value:.{precision}g}"
        if len(text) <= width:
            return text
    raise ValueError(f"cannot render {value} in {width} characters")


def _printable_range(lo: float, hi: float, width: int = 8) -> tuple[str, str]:
    """Physical bounds that fit the 8-char header fields and still contain [lo, hi].

    Rendering at header precision may shrink the range; pad outward until the
    parsed-back bounds enclose the data, so no sample gets clipped.
    """
    span = hi - lo
    pad = 0.0
    for _ in range(30):
        lo_txt = _fit_number(lo - pad * span, width)
        hi_txt = _fit_number(hi + pad * span, width)
        if float(lo_txt) <= lo and float(hi_txt) >= hi and float(lo_txt) < float(hi_txt):
            return lo_txt, hi_txt
        pad = max(pad * 2.0, 1e-6)
    raise ValueError(f"cannot encode physical range [{lo}, {hi}] in {width}-char fields")


def write_edf(recording: Recording, physical_range: tuple[float, float] | None = None) -> bytes:
    """Encode a Recording as EDF bytes (one data record per second).

    The digital range is the full int16 span; the physical range defaults to
    the observed min/max so quantization error stays within one digital step.
    Deterministic: identical recordings produce identical bytes.
    """
    fs = recording.sample_rate_hz
    spr = int(round(fs))
    if abs(spr - fs) > 1e-9:
        raise ValueError("write_edf requires an integer samples-per-second rate")
    n_samples = recording.n_samples
    if n_samples % spr != 0:
        raise ValueError(
            f"sample count {n_samples} is not a whole number of 1-second records at {fs} Hz"
        )
    n_records = n_samples // spr
    n_signals = recording.n_channels

    if physical_range is None:
        lo = float(recording.samples.min())
        hi = float(recording.samples.max())
        if lo == hi:
            hi = lo + 1.0
    else:
        lo, hi = physical_range
        if not lo < hi:
            raise ValueError("physical_range must be increasing")
    dmin, dmax = -32768, 32767
    lo_txt, hi_txt = _printable_range(lo, hi)
    lo_r, hi_r = float(lo_txt), float(hi_txt)

    header = b"".join(
        [
            _pad_ascii("0", 8, "version"),
            _pad_ascii(recording.patient_id, 80, "patient_id"),
            _pad_ascii("seizdet export", 80, "recording_id"),
            _pad_ascii("01.01.00", 8, "start_date"),
            _pad_ascii("00.00.00", 8, "start_time"),
            _pad_ascii(str(256 + 256 * n_signals), 8, "header_bytes"),
            _pad_ascii("", 44, "reserved"),
            _pad_ascii(str(n_records), 8, "n_records"),
            _pad_ascii("1", 8, "record_duration_s"),
            _pad_ascii(str(n_signals), 4, "n_signals"),
        ]
    )

    blocks = []
    for field, width in _SIGNAL_FIELDS:
        for s in range(n_signals):
            if field == "label":
                blocks.append(_pad_ascii(recording.channels[s], width, "label"))
            elif field == "physical_dim":
                blocks.append(_pad_ascii("uV", width, "physical_dim"))
            elif field == "physical_min":
                blocks.append(_pad_ascii(lo_txt, width, "physical_min"))
            elif field == "physical_max":
                blocks.append(_pad_ascii(hi_txt, width, "physical_max"))
            elif field == "digital_min":
                blocks.append(_pad_ascii(str(dmin), width, "digital_min"))
            elif field == "digital_max":
                blocks.append(_pad_ascii(str(dmax), width, "digital_max"))
            elif field == "samples_per_record":
                blocks.append(_pad_ascii(str(spr), width, "samples_per_record"))
            else:
                blocks.append(_pad_ascii("", width, field))

    # Quantize against the bounds a reader will parse back from the header.
    gain = (hi_r - lo_r) / (dmax - dmin)
    digital = np.rint((recording.samples - lo_r) / gain + dmin)
    digital = np.clip(digital, dmin, dmax).astype("<i2")

    records = digital.reshape(n_signals, n_records, spr).transpose(1, 0, 2)
    return header + b"".join(blocks) + records.tobytes()
