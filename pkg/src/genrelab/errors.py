"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can report failures with consistent prefixes, independent of
the human-readable message.
"""


class GenrelabError(Exception):
    """Base class for all package errors."""

    code = "GENRELAB_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__doc__)


# audio ingest

class MalformedContainer(GenrelabError):
    """The byte stream is not a valid RIFF/WAVE container."""

    code = "MALFORMED_AUDIO"


class UnsupportedEncoding(GenrelabError):
    """The WAV container does not hold 16-bit signed integer PCM."""

    code = "UNSUPPORTED_ENCODING"


class EmptyAudio(GenrelabError):
    """The WAV container holds zero data frames."""

    code = "EMPTY_AUDIO"


class TooShort(GenrelabError):
    """The decoded clip is shorter than the minimum analysis duration."""

    code = "TOO_SHORT"


# feature extraction

class ClipTooShortForFrame(GenrelabError):
    """The clip holds fewer samples than one analysis frame."""

    code = "CLIP_TOO_SHORT_FOR_FRAME"


# classifiers

class InsufficientData(GenrelabError):
    """Not enough training rows to fit the requested model."""

    code = "INSUFFICIENT_DATA"


class DegenerateLabels(GenrelabError):
    """The label vector is empty."""

    code = "DEGENERATE_LABELS"


class ModelNotTrained(GenrelabError):
    """Prediction requested from a model that was never fitted."""

    code = "MODEL_NOT_TRAINED"


class DimensionMismatch(GenrelabError):
    """Query vector length does not match the trained feature layout."""

    code = "DIMENSION_MISMATCH"


# evaluation

class EmptyTruthSet(GenrelabError):
    """A song's truth genre set is empty."""

    code = "EMPTY_TRUTH_SET"


class EmptyGrid(GenrelabError):
    """The outcome table holds no cells."""

    code = "EMPTY_GRID"


class EmptyPredictions(GenrelabError):
    """Metrics requested over an empty prediction sequence."""

    code = "EMPTY_PREDICTIONS"


# store

class SchemaVersionMismatch(GenrelabError):
    """The bundle document declares an unsupported schema version."""

    code = "SCHEMA_VERSION_MISMATCH"


class CorruptBundle(GenrelabError):
    """The bundle document failed to parse or validate."""

    code = "CORRUPT_BUNDLE"


class IoFailure(GenrelabError):
    """An underlying filesystem operation failed."""

    code = "IO_FAILURE"


class UnknownReportId(GenrelabError):
    """Feedback references a report id that is not in the history."""

    code = "UNKNOWN_REPORT_ID"
