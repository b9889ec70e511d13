"""Exception types raised by the solvers and the scenario loader."""


class QuatODEError(Exception):
    """Base class for all package errors."""


class NearZeroQuaternion(QuatODEError, ZeroDivisionError):
    """A quaternion that must be inverted is (numerically) zero."""


class NotASolution(QuatODEError):
    """The supplied exponent does not solve the characteristic relation."""


class DependentPair(QuatODEError):
    """The candidate fundamental pair is linearly dependent."""


class NonFiniteState(QuatODEError, ArithmeticError):
    """Numerical integration produced an overflow or NaN."""


class ScenarioError(QuatODEError, ValueError):
    """A scenario file failed validation.

    ``field`` names the offending key (or ``None`` for file-level problems).
    """

    def __init__(self, field, message):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(prefix + message)
