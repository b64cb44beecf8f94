"""Exception taxonomy shared across the package.

Every error raised by ncx derives from NcxError so callers can catch the
whole family; the CLI maps them to exit code 1 with a module-qualified
message.
"""

from __future__ import annotations


class NcxError(Exception):
    """Base class for all ncx errors."""


# --- signal_io ---------------------------------------------------------


class MalformedFile(NcxError):
    """File structure is invalid (ragged rows, bad header, bad magic...)."""


class NonFiniteSample(NcxError):
    """A sample parsed as NaN or infinity."""


class UnknownChannelLabel(NcxError):
    """Channel labels do not match the expected montage."""


class OffsetOutOfRange(NcxError):
    """An epoch offset extends past the end of the recording."""


class CountMismatch(NcxError):
    """Fewer epoch offsets supplied than epochs requested."""


# --- nonlinear_features -------------------------------------------------


class DegenerateScale(NcxError):
    """Curve-length scale leaves no complete segment, or the length vanished."""


class ConstantSeries(NcxError):
    """Series is constant; the log-log slope is undefined."""


class NoTemplateMatches(NcxError):
    """Sample entropy is undefined because a match count is zero.

    Carries both template-match counts so callers can apply their own
    convention for the degenerate case.
    """

    def __init__(self, message: str, a_count: int, b_count: int):
        super().__init__(message)
        self.a_count = a_count
        self.b_count = b_count


class FeatureExtractionError(NcxError):
    """Feature computation failed; annotated with subject/channel/epoch."""

    def __init__(self, subject_id: str, channel: str, epoch_index: int,
                 cause: Exception):
        super().__init__(
            f"feature extraction failed for subject={subject_id!r} "
            f"channel={channel!r} epoch={epoch_index}: {cause}")
        self.subject_id = subject_id
        self.channel = channel
        self.epoch_index = epoch_index
        self.cause = cause


# --- feature_stats ------------------------------------------------------


class ZeroVarianceFeature(NcxError):
    """A feature column has zero variance; names the offending feature."""


class FeatureNameMismatch(NcxError):
    """Feature names of an input do not match the model's."""


class SingleClassInput(NcxError):
    """An operation requiring both classes received only one."""


# --- classifiers --------------------------------------------------------


class NonConvergence(NcxError):
    """An iterative trainer failed to reach its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


# --- evaluation ---------------------------------------------------------


class KTooLarge(NcxError):
    """More cross-validation folds than rows."""


class IoFailure(NcxError):
    """Report or artifact files could not be written."""


# --- synth --------------------------------------------------------------


class ParameterOutOfRange(NcxError):
    """Generator parameter outside its valid domain."""


class EmbeddingFailure(NcxError):
    """Circulant embedding produced negative spectral mass."""


class CalibrationFailure(NcxError):
    """Bisection could not bracket the requested target statistic."""


# --- cli ----------------------------------------------------------------


class ConfigError(NcxError):
    """Invalid pipeline configuration; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
