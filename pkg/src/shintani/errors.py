"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`ShintaniError`,
which is itself a ``ValueError`` so that generic input-validation handlers keep
working.
"""


class ShintaniError(ValueError):
    """Base class for all package errors."""


class DomainError(ShintaniError):
    """A torus coordinate sits on (or too close to) an integer."""


class SingularMatrix(ShintaniError):
    """The coefficient matrix is not invertible."""


class NonPositiveMatrix(ShintaniError):
    """The series representation needs a matrix with positive entries."""


class ZeroMatrix(ShintaniError):
    pass


class RegionError(ShintaniError):
    """The spectral point lies outside the region a method supports."""


class OutsideRegion(RegionError):
    """No supported evaluation route exists for this spectral point."""


class GammaPole(ShintaniError):
    """A gamma factor is evaluated at one of its poles."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PrefactorPole(GammaPole):
    """The contour prefactor is singular at this spectral point."""


class TruncationFailure(ShintaniError):
    """A series could not be truncated to the requested tolerance."""


class QuadratureFailure(ShintaniError):
    """A quadrature rule would exceed its node budget."""


class PoleClearanceError(ShintaniError):
    """The requested contour radius would enclose a pole of the kernel."""


class CapExceeded(ShintaniError):
    """A combinatorial size cap was exceeded."""


class ParityMismatch(ShintaniError):
    """The multi-index does not have the parity the formula requires."""
