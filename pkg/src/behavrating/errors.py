"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation problems exit 2, fit
non-convergence exits 3 and I/O problems exit 4.
"""


class BehavRatingError(Exception):
    """Base class for all package errors."""


class ValidationError(BehavRatingError, ValueError):
    """An input record violates a data-model invariant."""


class IngestError(ValidationError):
    """A raw dataset row could not be mapped onto the canonical model."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FitError(BehavRatingError):
    """A statistical fit could not produce a usable model."""


class ConvergenceError(FitError):
    """An iterative solver hit its iteration cap before converging."""


class PipelineError(BehavRatingError):
    """An error raised inside a pipeline stage, tagged with that stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
