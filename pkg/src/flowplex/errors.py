"""Exception hierarchy.

Input problems (bad files, bad config, degenerate data) derive from
``ValidationError`` so the CLI can map them to exit code 1; anything else
that escapes is treated as an internal error (exit code 2).
"""

from __future__ import annotations


class FlowplexError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FlowplexError):
    """Invalid user-supplied input (files, flags, configuration)."""


class ParseError(ValidationError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    """Inconsistent or infeasible configuration values."""


class MissingPopulationError(ValidationError):
    """Population lookup failed for one or more origin countries."""

    def __init__(self, codes):
        self.codes = tuple(sorted(codes))
        super().__init__(
            "no population data for origin countries: " + ", ".join(self.codes)
        )


class UnknownCountryError(FlowplexError, LookupError):
    """A country code is not present in the node registry."""

    def __init__(self, code: str):
        self.code = code
        super().__init__(f"unknown country code: {code!r}")


class DegenerateGraphError(FlowplexError):
    """The graph is too small or too empty for the requested metric."""


class UndefinedStatisticError(FlowplexError):
    """The statistic has no defined value (e.g. zero variance)."""


class InsufficientDataError(FlowplexError):
    """Fewer observations than the statistic requires."""


class ContractViolationError(FlowplexError):
    """A caller broke an API precondition (e.g. unnormalized weights)."""
