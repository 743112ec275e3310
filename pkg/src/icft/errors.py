"""Exception types and warning categories shared across the package."""


class IcftError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergent(IcftError):
    """Adaptive quadrature ran out of subdivisions.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial result is usable.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class BracketInvalid(IcftError):
    """Root-finding target lies outside the supplied bracket."""


class OrderUnavailable(IcftError):
    """A profile was asked for a derivative order it cannot provide."""


class PositivityViolated(IcftError):
    """A profile that must stay positive crossed zero."""


class CouplingOutOfRange(IcftError):
    """Interaction couplings violate the stability bound."""


class CoincidentPoints(IcftError):
    """Two-point function evaluated at (effectively) coincident light-cone points."""


class PoleOnContour(IcftError):
    """Shifted-contour integral requested with a pole sitting on the contour."""


class OmegaZero(IcftError):
    """A regular-part route was asked for omega = 0, where only the ballistic
    delta peak lives."""


class GridUnderResolved(IcftError):
    """Doubling the quadrature grid moved the result by more than the
    tolerance allows."""


class ConfigInvalid(IcftError):
    """A run configuration failed validation; the message names the field."""


class UnderResolved(UserWarning):
    """Spectral data does not decay enough for the requested operation."""
