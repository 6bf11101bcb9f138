"""Exception types shared across the pipeline.

``InputError`` subclasses signal problems with user-supplied files or
configuration (CLI exit code 2); everything else raised from pipeline
stages is wrapped in ``FoldError`` by the evaluator (CLI exit code 1).
"""


class PipelineError(Exception):
    """Base class for all package errors."""


class InputError(PipelineError):
    """A problem with user-supplied inputs (files, labels, config)."""


class EmptyTranscript(InputError):
    """Transcript has no usable text before or after cleaning."""


class UnknownLabel(InputError):
    """Manifest label outside the accepted diagnosis set."""


class DuplicateId(InputError):
    """The same sample id appears more than once."""


class ManifestError(InputError):
    """Malformed manifest or unreadable referenced transcript file."""


class MissingFeatureRow(InputError):
    """A dataset id has no row in a feature or embedding CSV."""


class IdMismatch(InputError):
    """A feature or embedding CSV contains ids absent from the dataset."""


class NonFiniteValue(InputError):
    """NaN, infinity, or a blank cell where a finite real is required."""


class DimensionMismatch(InputError):
    """Matrix width differs from what a fitted model or loader expects."""


class ConfigError(InputError):
    """Invalid configuration value."""


class FoldError(PipelineError):
    """A pipeline stage failed; carries the cross-validation fold index."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause
