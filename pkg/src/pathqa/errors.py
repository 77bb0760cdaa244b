"""Error types shared across the pipeline.

Every failure mode carries a stable machine-readable code so the CLI can
report it and tests can assert on it.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class; `code` is a stable identifier, `message` is human text."""

    code = "PIPELINE_ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            extras = ", ".join(f"{k}={v!r}" for k, v in sorted(self.details.items()))
            return f"{self.code}: {self.message} ({extras})"
        return f"{self.code}: {self.message}"


class MalformedBox(PipelineError):
    code = "MALFORMED_BOX"


class OrphanSubtype(PipelineError):
    code = "ORPHAN_SUBTYPE"


class DuplicateName(PipelineError):
    code = "DUPLICATE_NAME"


class MissingGold(PipelineError):
    code = "MISSING_GOLD"


class ContextTooLong(PipelineError):
    code = "CONTEXT_TOO_LONG"


class BackendFailure(PipelineError):
    code = "BACKEND_FAILURE"


class NoValidSpan(PipelineError):
    code = "NO_VALID_SPAN"


class DimensionMismatch(PipelineError):
    code = "DIMENSION_MISMATCH"


class EmptySequence(PipelineError):
    code = "EMPTY_SEQUENCE"


class EmptyInput(PipelineError):
    code = "EMPTY_INPUT"


class ServiceUnreachable(PipelineError):
    code = "SERVICE_UNREACHABLE"


class ServiceError(PipelineError):
    code = "SERVICE_ERROR"


class ServiceTimeout(PipelineError):
    code = "TIMEOUT"


class BundleInvalid(PipelineError):
    code = "BUNDLE_INVALID"


class UnknownSplit(PipelineError):
    code = "UNKNOWN_SPLIT"


class DanglingPrediction(PipelineError):
    code = "DANGLING_PREDICTION"


class MissingSpan(PipelineError):
    code = "MISSING_SPAN"


class ConfigError(PipelineError):
    code = "CONFIG_ERROR"
