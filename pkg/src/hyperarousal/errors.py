"""Exception hierarchy shared by every pipeline stage.

``DataError`` subclasses map to CLI exit status 1 and ``ConfigError`` to exit
status 2. Violations found by ``validate_recording`` are data, not exceptions.
"""

from typing import Any, Dict, Optional


class HyperarousalError(Exception):
    """Base class for all errors raised by this package."""


class DataError(HyperarousalError):
    """Input data does not satisfy a file schema or a domain invariant."""


class MalformedRowError(DataError):
    """A row in an input file could not be parsed or violates a row rule."""

    def __init__(self, path: str, line: int, rule: str):
        self.path = str(path)
        self.line = line
        self.rule = rule
        super().__init__(f"{self.path}:{line}: {rule}")


class DuplicateSampleError(DataError):
    """Two sample rows share the same (participant, timestamp) key."""

    def __init__(self, path: str, line: int, participant_id: str, timestamp: int):
        self.path = str(path)
        self.line = line
        self.participant_id = participant_id
        self.timestamp = timestamp
        super().__init__(
            f"{self.path}:{line}: duplicate sample for participant "
            f"{participant_id!r} at timestamp {timestamp}"
        )


class UnknownParticipantError(DataError):
    """An event references a participant with no samples."""

    def __init__(self, path: str, line: int, participant_id: str):
        self.path = str(path)
        self.line = line
        self.participant_id = participant_id
        super().__init__(
            f"{self.path}:{line}: event for unknown participant {participant_id!r}"
        )


class FeatureExtractionError(DataError):
    """A window cannot be featurized; ``reason`` names the failed precondition."""

    def __init__(self, participant_id: str, window_start: int, reason: str):
        self.participant_id = participant_id
        self.window_start = window_start
        self.reason = reason
        super().__init__(
            f"window {participant_id}@{window_start} rejected: {reason}"
        )


class InsufficientDataError(DataError):
    """A dataset lacks what an operation needs (both classes, two participants)."""


class FeatureOrderError(DataError):
    """Scoring input does not follow the model's feature order."""


class UnsupportedModelError(DataError):
    """The requested operation is not defined for this model family."""


class ModelFileError(DataError):
    """A model file is truncated, corrupted or structurally invalid."""


class SchemaVersionError(ModelFileError):
    """A model file declares a schema version this build cannot read."""

    def __init__(self, found: Any, supported: int):
        self.found = found
        self.supported = supported
        super().__init__(
            f"unsupported model schema_version {found!r} (supported: {supported})"
        )


class ConfigError(HyperarousalError):
    """Run configuration is invalid."""


class ConvergenceError(HyperarousalError):
    """An optimizer reached its iteration cap without meeting its tolerance.

    Attributes:
        diagnostics: Best-so-far state (iterations, objective, gradient norm, ...).
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        detail = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        super().__init__(f"{message} ({detail})" if detail else message)


class StageError(HyperarousalError):
    """A CLI stage failed; names the stage and the file involved."""

    def __init__(self, stage: str, path: Optional[str], cause: BaseException):
        self.stage = stage
        self.path = str(path) if path is not None else None
        self.cause = cause
        where = f" ({self.path})" if self.path else ""
        super().__init__(f"stage {stage}{where}: {cause}")
