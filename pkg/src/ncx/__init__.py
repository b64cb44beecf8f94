"""EEG complexity features and classical classification benchmarks."""

from . import errors
from .nonlinear_features import (HfdParams, SampEnParams, FeatureVector,
                                 curve_length, higuchi_fd, sample_entropy,
                                 sample_entropy_counts, extract_features)
from .signal_io import (MONTAGE_19, Epoch, EpochSet, Recording,
                        extract_epochs, evenly_spaced_offsets,
                        load_recording, write_recording, validate_montage)

__version__ = "0.1.0"
