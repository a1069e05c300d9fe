"""Exception types shared across the toolkit."""

from __future__ import annotations


class ValidationError(ValueError):
    """An input violates a documented precondition or invariant."""


class EstimationError(RuntimeError):
    """A window could not produce a breathing-rate estimate."""


class PipelineStageError(EstimationError):
    """An estimation stage failed; carries the name of the failing stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class RecordingFormatError(ValidationError):
    """A recording file is malformed; ``code`` identifies the defect."""

    BAD_MAGIC = "bad-magic"
    BAD_VERSION = "bad-version"
    BAD_HEADER = "bad-header"
    TRUNCATED = "truncated-payload"
    TRAILING = "trailing-bytes"
    NONFINITE = "nonfinite-samples"

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ScenarioFormatError(ValidationError):
    """A scenario file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TruthCoverageError(ValidationError):
    """The ground-truth track does not cover the evaluated time span."""
