"""
Exception hierarchy shared by every subpackage.

Each family carries the process exit code the CLI uses when an error of that
family escapes a subcommand.
"""

from typing import Any, Dict, Optional


class MovieSuccessError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used for the CLI error line."""
        return {
            "type": self.__class__.__name__,
            "code": self.exit_code,
            "message": self.message,
            "details": self.details,
        }


class ContractViolation(MovieSuccessError, ValueError):
    """An argument or input object broke an operation's precondition."""

    exit_code = 2


# -- data errors --------------------------------------------------------------

class DataError(MovieSuccessError):
    exit_code = 3


class SchemaMismatch(DataError):
    """CSV header does not match the expected column set."""


class MissingBudget(DataError):
    """A record has no usable budget, so ROI and the label are undefined."""


class MissingRevenue(DataError):
    """A record has no opening-weekend revenue, so the targets are undefined."""


class InconsistentCounts(DataError):
    """Review counts imply I0 + R0 > 1."""


class DegenerateColumn(DataError):
    """A column is constant or too short to fit a transform."""


class RankDeficient(DataError):
    """Covariance has fewer positive eigenvalues than requested components."""


class CorruptState(DataError):
    """Pipeline state file is unreadable or fails its integrity check."""


class StateLocked(DataError):
    """Another process holds the pipeline state lock."""


class InsufficientClassMembers(DataError):
    """A class has too few members for the requested stratification."""


class EmptyDataset(DataError):
    """An operation received no rows."""


# -- extractor errors ---------------------------------------------------------

class ExtractorError(MovieSuccessError):
    exit_code = 4


class MalformedResponse(ExtractorError):
    """Extractor output is not a JSON object with a sentiment_score."""


class ExtractorUnavailable(ExtractorError):
    """Remote extraction failed after all retries and no fallback is allowed."""


# -- training errors ----------------------------------------------------------

class TrainingError(MovieSuccessError):
    exit_code = 5


class NonFiniteLoss(TrainingError):
    """Loss became NaN or infinite during training."""


class ShapeMismatch(TrainingError, ValueError):
    """Input width or parameter shapes do not chain."""


class CheckpointError(TrainingError):
    pass


class VersionMismatch(CheckpointError):
    """Checkpoint format version or declared shape is incompatible."""


class CorruptCheckpoint(CheckpointError):
    """Checkpoint is truncated, unparsable, or fails its checksum."""
