"""Exception types raised by the numerical routines."""


class NCSError(Exception):
    """Base class for all errors raised by :mod:`ncs`."""


class OutsideRadiusError(NCSError, ValueError):
    """A label or series argument lies on or beyond the convergence radius."""


class NonConvergentError(NCSError, ArithmeticError):
    """A series, contour integral or quadrature did not meet its tolerance."""


class NegativeWeightError(NCSError, ArithmeticError):
    """A weight function evaluated to a clearly negative value."""


class DivisionUnstableError(NCSError, ArithmeticError):
    """A ratio was requested with a denominator below the absolute tolerance."""


class RepresentationOverflow(NCSError, OverflowError):
    """A value does not fit in double precision on the requested scale."""
