"""Exception hierarchy shared by the simulator, analytics and I/O layers."""

from __future__ import annotations

from dataclasses import dataclass


class LaborSimError(Exception):
    """Base class for every error raised by :mod:`laborsim`."""


class ConfigError(LaborSimError, ValueError):
    """A market configuration violates one of its invariants."""


class DomainError(LaborSimError, ValueError):
    """An argument lies outside the domain of a closed-form expression."""


class SeriesValidationError(DomainError):
    """A cumulative employment series is not a valid cumulative quantity."""


class SaturationError(DomainError):
    """A stage-wise quantity was requested past the point the market saturated."""


@dataclass(frozen=True)
class Diagnostic:
    row: int
    column: str
    message: str

    def __str__(self) -> str:
        return f"row {self.row}, column {self.column!r}: {self.message}"


class DataFormatError(LaborSimError, ValueError):
    """Malformed or invalid employment CSV input.

    ``diagnostics`` carries one entry per offending cell (1-based data rows,
    row 0 is the header).
    """

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class BracketingError(LaborSimError):
    """The calibration target lies outside the achievable unemployment range."""

    def __init__(self, target: float, low_u: float, high_u: float):
        self.target = target
        self.feasible = (low_u, high_u)
        super().__init__(
            f"target U={target:.6g} is outside the feasible interval "
            f"[{low_u:.6g}, {high_u:.6g}] spanned by the gamma search range")


class NonMonotoneError(LaborSimError):
    """Monte Carlo estimates of U(gamma) decreased beyond their noise band."""
