"""Recording ingestion: EDF and CSV parsing, epoching, synthetic generation."""

from .edf import EdfFormatError, parse_edf, read_edf, write_edf
from .labels import (
    LabelFormatError,
    load_labels,
    load_labels_file,
    segment_epochs,
    write_labels,
)
from .synth import (
    BAND_CENTERS_HZ,
    CohortConfig,
    SynthConfig,
    patient_configs,
    synthesize_cohort,
    synthesize_recording,
)
from .types import (
    ALL_CLASS_CODES,
    BACKGROUND,
    SEIZURE_CLASS_NAMES,
    AnnotationSet,
    EpochSet,
    LabelInterval,
    Recording,
)

__all__ = [
    "ALL_CLASS_CODES",
    "BACKGROUND",
    "BAND_CENTERS_HZ",
    "AnnotationSet",
    "CohortConfig",
    "EdfFormatError",
    "EpochSet",
    "LabelFormatError",
    "LabelInterval",
    "Recording",
    "SEIZURE_CLASS_NAMES",
    "SynthConfig",
    "load_labels",
    "load_labels_file",
    "parse_edf",
    "patient_configs",
    "read_edf",
    "segment_epochs",
    "synthesize_cohort",
    "synthesize_recording",
    "write_edf",
    "write_labels",
]
