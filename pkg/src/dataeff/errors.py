"""Shared exception hierarchy.

Everything raised on bad data or bad queries derives from DataEffError so
callers (and the CLI) can distinguish data problems from genuine bugs.
"""


class DataEffError(Exception):
    """Base class for all toolkit errors."""


class FrameParseError(DataEffError):
    """Malformed bracketed frame text. Carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class CorpusError(DataEffError):
    """Unreadable or malformed corpus file. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownDomainError(DataEffError):
    """A requested domain is not present in the corpus."""


class SamplingError(DataEffError):
    """Invalid subset specification or an unsatisfiable draw."""


class FitError(DataEffError):
    """Curve fitting cannot proceed (too few points, bad inputs)."""


class CurveDomainError(DataEffError):
    """Curve evaluated or inverted outside its mathematical domain."""


class UnreachableTargetError(CurveDomainError):
    """Inverse query above the curve's asymptote: the target EM is never reached."""

    def __init__(self, target: float, ceiling: float):
        super().__init__(
            f"exact match {target:g} is at or above the fitted ceiling c={ceiling:g}; "
            "no amount of target data reaches it"
        )
        self.target = target
        self.ceiling = ceiling


class ProtocolError(DataEffError):
    """Inconsistent manifests, ledgers, or runner output."""


class RunnerError(DataEffError):
    """A single parser run failed; recorded in the ledger, does not abort the protocol."""


class AnnotationError(DataEffError):
    """Malformed complexity annotation file."""


class AnalysisError(DataEffError):
    """Aggregation over results cannot proceed (missing predictions, empty input)."""
