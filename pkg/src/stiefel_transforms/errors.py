"""Exception hierarchy for stiefel_transforms."""

from __future__ import annotations


class StiefelError(Exception):
    """Base class for every domain error raised by the package."""


class PoleError(StiefelError):
    """A gamma factor was evaluated within ``pole_eps`` of its polar set."""


class ExcludedParamError(PoleError):
    """The parameter lies in a set excluded by a normalising factor."""


class DimensionError(StiefelError, ValueError):
    """Frame sizes violate the constraints of the requested operation."""


class ConvergenceDomainError(StiefelError):
    """The parameter lies outside the strip where the integral converges."""


class RankError(StiefelError):
    """A matrix that must have full column rank is (numerically) rank deficient."""


class DegenerateSampleError(StiefelError):
    """A Gaussian draw could not be orthonormalised after a retry."""


class SingularKernelError(StiefelError):
    """A kernel was evaluated at zero with a non-positive exponent."""


class RejectionRateError(StiefelError):
    """Too many Monte Carlo samples hit the singular set of the kernel."""


class StepError(StiefelError):
    """The finite-difference step is outside the supported range."""


class BernsteinZeroError(StiefelError):
    """The Bernstein polynomial vanishes at the requested parameter."""


class QuadratureDegreeError(StiefelError):
    """The requested expansion degree exceeds the quadrature resolution."""


class ClosedFormUnavailableError(StiefelError):
    """No closed-form Cayley-Laplace image exists for this test function."""


class ConfigError(StiefelError):
    """A run configuration field is invalid."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")
