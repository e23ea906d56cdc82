"""Exception types shared across the package.

Exit-code mapping used by the CLI: ValidationError -> 2, CapExceeded -> 3,
I/O failures -> 4.
"""

from __future__ import annotations


class TsfError(Exception):
    """Base class for all package errors."""


class ParseError(TsfError):
    """Malformed input file.  Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(TsfError):
    """A geometric or combinatorial invariant does not hold."""


class InconsistencyError(ValidationError):
    """Two independent internal computations disagree (e.g. angle vs Euler)."""


class BasisError(TsfError):
    """Homology basis construction failed or basis tags do not match."""


class CapExceeded(TsfError):
    """A configured enumeration cap was hit.

    ``partial`` holds whatever partial result was computed before aborting.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
