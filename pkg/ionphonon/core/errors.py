"""Exception types raised across the ionphonon package."""

from typing import List, Optional, Sequence


class IonPhononError(Exception):
    """Base class for all package errors."""


class InvalidInputError(IonPhononError, ValueError):
    """An argument is outside its allowed domain."""


class ConfigError(InvalidInputError):
    """A run configuration is malformed."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InfeasibleSectorError(InvalidInputError):
    """No occupation vector satisfies the number and cap constraints."""


class EmptySectorError(InfeasibleSectorError):
    """Enumerating a sector produced no states."""


class TrapDestabilizedError(IonPhononError, ValueError):
    """The standing wave pushes the radial frequency to zero or below."""


class UndefinedGapError(IonPhononError, ValueError):
    """A gap was requested in a one-dimensional sector."""


class ZeroDensityError(IonPhononError, ValueError):
    """A density-rescaled correlator hit a site with no phonons."""

    def __init__(self, site: int):
        self.site = site
        super().__init__(f"site {site} has zero density; C^aa undefined")


class SpinMappingError(IonPhononError, ValueError):
    """The two-level spin map was requested outside its regime."""


class FitError(IonPhononError, ValueError):
    """A fit could not be performed on the supplied data."""


class NonPositiveDataError(FitError):
    """Logarithmic fits need strictly positive values."""

    def __init__(self, separations: Sequence[float]):
        self.separations: List[float] = [float(r) for r in separations]
        super().__init__(f"non-positive values at separations {self.separations}")


class NotDecayingError(FitError):
    """An exponential fit returned a non-negative slope."""


class InvalidRegimeError(FitError):
    """The data do not describe the regime the fit assumes."""


class ConvergenceError(IonPhononError, RuntimeError):
    """An iterative method stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
