"""Exception types shared across the library."""


class SSCDError(Exception):
    """Base class for all errors raised by this package."""


class SiblingFormatError(SSCDError):
    """A sibling embedding file is malformed.

    ``offset`` is the byte position at which parsing failed, when known.
    """

    def __init__(self, message: str, path=None, offset: int | None = None):
        if path is not None:
            message = f"{path}: {message}"
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.path = path
        self.offset = offset


class ManifestError(SSCDError):
    """A corpus manifest violates its schema or invariants."""


class GoldFormatError(SSCDError):
    """A gold ranking file cannot be parsed or has duplicate entries."""


class UnscorableWordError(SSCDError):
    """A word cannot be scored (typically an empty sibling set).

    Batch drivers catch this per word and keep going; it never aborts a run.
    """

    def __init__(self, lemma_key: str, reason: str):
        super().__init__(f"{lemma_key!r}: {reason}")
        self.lemma_key = lemma_key
        self.reason = reason


class DegenerateInputError(SSCDError):
    """A metric was evaluated on input where it is mathematically undefined."""


class ConfigError(SSCDError):
    """Invalid run, swap, or metric configuration."""


class EvaluationError(SSCDError):
    """Evaluation against gold is impossible (too few words, constant ranks)."""
