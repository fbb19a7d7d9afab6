"""Exception hierarchy shared across the package.

ValidationError covers bad inputs caught before any computation starts
(missing files, malformed arguments, empty corpora); ComputationError
covers failures raised while computing (diverged training, impossible
tests). The CLI maps them to exit codes 1 and 2 respectively.
"""


class EventpolError(Exception):
    """Base class for all package errors."""


class ValidationError(EventpolError):
    """Input failed validation before computation started."""


class ComputationError(EventpolError):
    """Computation could not be completed on otherwise valid input."""


class InvalidDateRangeError(ValidationError):
    """Date interval with start after end."""


class EmptyCorpusError(ValidationError):
    """An operation that needs records received none."""


class EmptyLexiconError(ValidationError):
    """Lexicon file produced no usable entries."""


class EmptyWindowError(ComputationError):
    """An event window contains no observations, so no test is possible."""


class TrainingDivergedError(ComputationError):
    """Training loss became non-finite (learning rate too high)."""


class ModelFileError(ValidationError):
    """Model file is missing fields, corrupt, or of an unknown version."""
