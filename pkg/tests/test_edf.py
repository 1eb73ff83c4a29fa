"""EDF reader/writer tests against hand-constructed fixture bytes."""

import numpy as np
import pytest

from seizdet.ingest import EdfFormatError, parse_edf, write_edf
from seizdet.ingest.types import Recording


def build_edf(
    signals,
    samples_per_record,
    n_records,
    record_duration=1,
    physical=(-200.0, 200.0),
    digital=(-2048, 2047),
    n_records_field=None,
    patient_id="p-fixture",
    truncate_bytes=0,
    digital_equal=False,
):
    """Assemble EDF bytes field by field, independent of the writer under test.

    ``signals`` is a list of int arrays of digital values (one per signal),
    each of length samples_per_record[i] * n_records.
    """
    ns = len(signals)

    def pad(text, width):
        return str(text).encode("ascii").ljust(width)

    head = b"".join(
        [
            pad("0", 8),
            pad(patient_id, 80),
            pad("fixture recording", 80),
            pad("02.01.03", 8),
            pad("10.20.30", 8),
            pad(256 + 256 * ns, 8),
            pad("", 44),
            pad(n_records if n_records_field is None else n_records_field, 8),
            pad(record_duration, 8),
            pad(ns, 4),
        ]
    )
    dlo, dhi = digital
    if digital_equal:
        dhi = dlo
    per_signal = b"".join(
        [
            b"".join(pad(f"sig{i}", 16) for i in range(ns)),
            b"".join(pad("", 80) for _ in range(ns)),
            b"".join(pad("uV", 8) for _ in range(ns)),
            b"".join(pad(physical[0], 8) for _ in range(ns)),
            b"".join(pad(physical[1], 8) for _ in range(ns)),
            b"".join(pad(dlo, 8) for _ in range(ns)),
            b"".join(pad(dhi, 8) for _ in range(ns)),
            b"".join(pad("", 80) for _ in range(ns)),
            b"".join(pad(samples_per_record[i], 8) for i in range(ns)),
            b"".join(pad("", 32) for _ in range(ns)),
        ]
    )
    records = []
    for r in range(n_records):
        for i, sig in enumerate(signals):
            spr = samples_per_record[i]
            chunk = np.asarray(sig[r * spr : (r + 1) * spr], dtype="<i2")
            records.append(chunk.tobytes())
    body = b"".join(records)
    if truncate_bytes:
        body = body[:-truncate_bytes]
    return head + per_signal + body


def test_scaling_verified_at_range_endpoints():
    # digital [-2048, 2047] mapped onto physical [-200, 200] uV: by hand,
    # gain = 400/4095, physical(d) = -200 + (d + 2048) * gain.
    digital = np.zeros(250, dtype=np.int64)
    digital[0] = -2048
    digital[1] = 2047
    digital[2] = 0
    data = build_edf([digital], [250], 1)
    rec = parse_edf(data)
    assert rec.sample_rate_hz == 250.0
    assert rec.n_samples == 250
    gain = 400.0 / 4095.0
    assert rec.samples[0, 0] == pytest.approx(-200.0, abs=1e-12)
    assert rec.samples[0, 1] == pytest.approx(200.0, abs=1e-12)
    assert rec.samples[0, 2] == pytest.approx(-200.0 + 2048 * gain, abs=1e-12)
    assert rec.patient_id == "p-fixture"


def test_unknown_record_count_inferred_from_size():
    digital = np.arange(750) % 100
    data = build_edf([digital], [250], 3, n_records_field=-1)
    rec = parse_edf(data)
    assert rec.n_samples == 750


def test_empty_stream_is_malformed_header():
    with pytest.raises(EdfFormatError, match="version"):
        parse_edf(b"")


def test_non_integer_header_field_names_field_and_offset():
    digital = np.zeros(250)
    data = bytearray(build_edf([digital], [250], 1))
    data[252:256] = b"abcd"  # n_signals field
    with pytest.raises(EdfFormatError, match=r"n_signals.*byte 252"):
        parse_edf(bytes(data))


def test_truncated_data_record_rejected():
    digital = np.zeros(500)
    data = build_edf([digital], [250], 2, truncate_bytes=10)
    with pytest.raises(EdfFormatError, match="truncated"):
        parse_edf(data)


def test_equal_digital_range_rejected():
    digital = np.zeros(250)
    data = build_edf([digital], [250], 1, digital_equal=True)
    with pytest.raises(EdfFormatError, match="digital_min"):
        parse_edf(data)


def test_mixed_rates_rejected_by_default_but_resampled_on_request():
    fast = np.arange(500) % 7
    slow = np.arange(250) % 5
    data = build_edf([fast, slow], [500, 250], 1)
    with pytest.raises(EdfFormatError, match="mixed sample rates"):
        parse_edf(data)
    rec = parse_edf(data, resample_hz=250.0)
    assert rec.sample_rate_hz == 250.0
    assert rec.samples.shape == (2, 250)


def test_roundtrip_within_one_quantization_step():
    rng = np.random.default_rng(7)
    samples = rng.uniform(-150.0, 150.0, size=(3, 500))
    rec = Recording("p9", 250.0, ["a", "b", "c"], samples)
    back = parse_edf(write_edf(rec))
    lo, hi = samples.min(), samples.max()
    step = (hi - lo) / 65535
    assert back.patient_id == "p9"
    assert back.channels == ["a", "b", "c"]
    assert np.max(np.abs(back.samples - samples)) <= step
    assert back.sample_rate_hz == 250.0


def test_writer_is_deterministic():
    rng = np.random.default_rng(3)
    rec = Recording("pD", 250.0, ["a", "b"], rng.normal(size=(2, 250)))
    assert write_edf(rec) == write_edf(rec)


def test_writer_rejects_partial_second():
    rec = Recording("pX", 250.0, ["a", "b"], np.zeros((2, 260)))
    with pytest.raises(ValueError, match="whole number"):
        write_edf(rec)
