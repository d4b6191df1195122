"""Exception hierarchy shared by all modules."""


class ExpmDEError(Exception):
    """Base class for errors raised by this package."""


class SingularMatrix(ExpmDEError, ArithmeticError):
    """A factorization met a pivot that is zero at working precision.

    ``node`` is set by the quadrature routines to the index k of the
    offending quadrature node, when known.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NoConvergence(ExpmDEError, ArithmeticError):
    """The QR eigenvalue iteration did not deflate within its sweep cap."""


class IntervalOverflow(ExpmDEError):
    """No truncation interval within the scan cap meets the tolerance."""


class InvalidTolerance(ExpmDEError, ValueError):
    pass


class DegenerateEstimate(ExpmDEError, ArithmeticError):
    """Two trial errors do not define a positive convergence rate."""


class MeshFloor(ExpmDEError):
    """The mesh size requested by the rate model is below ``h_min``."""

    def __init__(self, message, h=None):
        super().__init__(message)
        self.h = h


class MatrixMarketError(ExpmDEError, ValueError):
    """Malformed Matrix Market input."""
