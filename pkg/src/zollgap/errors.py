"""Exception types shared across the package and mapped to CLI exit codes."""

from __future__ import annotations


class ZollgapError(Exception):
    """Base class for package errors."""


class FinenessError(ZollgapError):
    """A candidate point set failed one of the fineness conditions."""

    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f"fineness check failed ({condition}): {message}")


class GoodnessError(ZollgapError):
    """A sampled base point / direction pair admitted no negative witness."""

    def __init__(self, message: str, base=None, direction=None, value=None):
        self.base = base
        self.direction = direction
        self.value = value
        super().__init__(message)


class InputError(ZollgapError):
    """Missing, malformed, or invariant-violating input artifact."""


class DegenerateMetricError(ZollgapError):
    """The conformal factor 1 + t*f is not positive (t too large)."""
