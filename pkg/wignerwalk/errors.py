"""
Exception hierarchy for the walk library.
Each error also derives from the builtin it specialises, so callers can catch
either the library type or the plain ValueError / NotImplementedError.
"""


class WalkError(Exception):
    """Base class for every error raised by wignerwalk."""


class SpinValueError(WalkError, ValueError):
    """Invalid half-integer spin or index."""


class ParameterRangeError(WalkError, ValueError):
    """A numeric parameter (rho, a, beta, t, ...) lies outside its domain."""


class DegenerateParameterError(ParameterRangeError):
    """rho at an endpoint where an asymptotic object is undefined."""


class NormalizationError(WalkError, ValueError):
    """Coin state is not normalised."""


class BasisMismatchError(WalkError, ValueError):
    """Coin state tagged with the wrong basis, or basis built for another (j, rho)."""


class UnsupportedSpinError(WalkError, NotImplementedError):
    """No closed form is available for the requested spin."""


class StateSpecError(WalkError, ValueError):
    """Named state or amplitude list cannot be resolved."""
