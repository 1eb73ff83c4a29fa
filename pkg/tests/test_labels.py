"""Label CSV parsing and epoch segmentation tests."""

import numpy as np
import pytest

from seizdet.ingest import (
    AnnotationSet,
    LabelFormatError,
    LabelInterval,
    Recording,
    load_labels,
    segment_epochs,
    write_labels,
)

HEADER = "patient_id,start_s,end_s,class\n"


def make_recording(duration_s=10.0, n_channels=2, fs=250.0, patient="p1"):
    t = int(duration_s * fs)
    return Recording(patient, fs, [f"c{i}" for i in range(n_channels)], np.zeros((n_channels, t)))


class TestLoadLabels:
    def test_single_row(self):
        ann = load_labels(HEADER + "p1,3.0,7.5,2\n")
        ivs = ann.for_patient("p1")
        assert ivs == [LabelInterval(3.0, 7.5, 2)]

    def test_overlap_names_both_rows(self):
        text = HEADER + "p1,1.0,5.0,1\np1,4.0,9.0,2\n"
        with pytest.raises(LabelFormatError, match=r"row 2.*row 3"):
            load_labels(text)

    def test_overlap_other_patients_is_fine(self):
        ann = load_labels(HEADER + "p1,1.0,5.0,1\np2,4.0,9.0,2\n")
        assert ann.patients() == ["p1", "p2"]

    def test_empty_file_is_all_background(self):
        ann = load_labels("")
        assert ann.patients() == []
        assert ann.coverage("whoever", 0.0, 1.0) == {0: 1.0}

    def test_unknown_class_code(self):
        with pytest.raises(LabelFormatError, match="unknown class code 9"):
            load_labels(HEADER + "p1,0,1,9\n")

    def test_bad_header(self):
        with pytest.raises(LabelFormatError, match="header"):
            load_labels("pid,a,b,c\np1,0,1,1\n")

    def test_inverted_interval(self):
        with pytest.raises(LabelFormatError, match="precede"):
            load_labels(HEADER + "p1,5,2,1\n")

    def test_roundtrip_through_writer(self):
        ann = load_labels(HEADER + "p1,3,7.5,2\np2,0,60,0\n")
        assert load_labels(write_labels(ann)).intervals == ann.intervals


class TestSegmentEpochs:
    def test_partial_trailing_second_dropped(self):
        rec = make_recording(duration_s=10.7)
        epochs = segment_epochs(rec, AnnotationSet({}))
        assert len(epochs) == 10

    def test_majority_and_half_coverage_tie_goes_to_seizure(self):
        # Interval [3.0, 7.5): epochs 3..6 fully covered; epoch 7 covered
        # exactly 0.5 s, which ties and resolves toward seizure.
        rec = make_recording(duration_s=10.0)
        ann = load_labels(HEADER + "p1,3.0,7.5,2\n")
        epochs = segment_epochs(rec, ann)
        assert epochs.labels.tolist() == [0, 0, 0, 2, 2, 2, 2, 2, 0, 0]

    def test_sub_majority_coverage_is_background(self):
        rec = make_recording(duration_s=5.0)
        ann = load_labels(HEADER + "p1,2.0,2.4,1\n")
        epochs = segment_epochs(rec, ann)
        assert epochs.labels.tolist() == [0, 0, 0, 0, 0]

    def test_no_annotations_all_background(self):
        rec = make_recording(duration_s=4.0)
        epochs = segment_epochs(rec, AnnotationSet({}))
        assert epochs.labels.tolist() == [0] * 4
        assert epochs.epoch_indices.tolist() == [0, 1, 2, 3]

    def test_epoch_count_is_floor_duration(self):
        for duration in (1.0, 2.999, 7.2, 12.0):
            rec = make_recording(duration_s=duration)
            assert len(segment_epochs(rec, AnnotationSet({}))) == int(duration)

    def test_too_short_recording(self):
        rec = make_recording(duration_s=0.9)
        with pytest.raises(ValueError, match="shorter than one epoch"):
            segment_epochs(rec, AnnotationSet({}))

    def test_windows_carry_raw_samples(self):
        fs = 250.0
        t = np.arange(int(3 * fs))
        samples = np.stack([t, -t]).astype(float)
        rec = Recording("p1", fs, ["a", "b"], samples)
        epochs = segment_epochs(rec, AnnotationSet({}))
        assert epochs.windows.shape == (3, 2, 250)
        np.testing.assert_array_equal(epochs.windows[1, 0], t[250:500])

    def test_seizure_class_tie_takes_smallest_code(self):
        rec = make_recording(duration_s=2.0)
        ann = load_labels(HEADER + "p1,1.0,1.5,4\np1,1.5,2.0,3\n")
        epochs = segment_epochs(rec, ann)
        assert epochs.labels.tolist()[1] == 3
