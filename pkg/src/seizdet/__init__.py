"""seizdet: seizure detection from multichannel EEG synchronization patterns.

The pipeline turns EEG recordings into per-second "brain activity pattern"
images (phase-locking, band energy and phase-entropy blocks across seven
frequency bands), trains a small convolutional network on them, and
evaluates with ROC/AUC under patient-wise protocols.
"""

__version__ = "0.1.0"

from . import container, dsp, evaluate, features, ingest, nn, pipeline

__all__ = ["container", "dsp", "evaluate", "features", "ingest", "nn", "pipeline", "__version__"]
