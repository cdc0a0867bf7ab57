"""Levy-Attack exceptions."""
from __future__ import annotations


class LevyAttackError(Exception):
    """Base class for all Levy-Attack errors."""


class DomainError(LevyAttackError, ValueError):
    """A parameter or precondition is outside its domain."""


class UsageError(LevyAttackError):
    """Invalid command line usage."""


class ResampleRequired(LevyAttackError):
    """A proposal had zero norm and must be drawn again."""


class InitializationFailed(LevyAttackError):
    """No adversarial starting point was found."""

    def __init__(self, attempts: int) -> None:
        """Init the error."""
        super().__init__(f"No adversarial starting point after {attempts} draws")
        self.attempts = attempts


class DimensionMismatch(DomainError):
    """Input dimension does not match the oracle."""


class OutOfBoundsInput(DomainError):
    """Input lies outside the oracle's input bounds."""


class ModelFileNotFound(LevyAttackError, FileNotFoundError):
    """Model file does not exist."""


class ModelFormatError(LevyAttackError):
    """Model file is malformed or truncated."""


class DimensionChainError(ModelFormatError):
    """Adjacent layer shapes do not chain."""


class IdxFormatError(LevyAttackError):
    """IDX file could not be parsed."""

    def __init__(self, message: str, offset: int) -> None:
        """Init the error."""
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class BadMagicError(IdxFormatError):
    """IDX magic number is not the expected one."""


class TruncatedPayloadError(IdxFormatError):
    """IDX file ended before the declared payload."""


class DatasetError(LevyAttackError):
    """Dataset is inconsistent."""


class CountMismatchError(DatasetError):
    """Image and label counts differ."""


class InvalidLabelError(DatasetError):
    """Label outside the class range."""


class DegenerateLabelsError(DatasetError):
    """Dataset holds fewer than two classes."""


class ExportError(LevyAttackError):
    """Sample dump could not be written or read."""
