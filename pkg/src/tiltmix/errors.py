"""Exception types shared across the package."""

from __future__ import annotations


class TiltmixError(Exception):
    """Base class for package errors."""


class DomainError(TiltmixError, ValueError):
    """An input value is outside the mathematical domain (NaN, inf, ...)."""


class ConfigurationError(TiltmixError, ValueError):
    """A configuration value violates its documented constraints."""


class SampleRejected(TiltmixError):
    """An accelerometer sample was rejected; the previous tilt stays valid."""


class NotReady(TiltmixError):
    """An operation was called before its required state exists."""


class TrajectoryFormatError(DomainError):
    """A trajectory CSV failed to parse; `line` is the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line
