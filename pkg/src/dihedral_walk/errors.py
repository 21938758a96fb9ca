"""Exception hierarchy shared by every module of the package."""


class WalkError(Exception):
    """Base class for all errors raised by ``dihedral_walk``."""


class InputError(WalkError, ValueError):
    """An argument is malformed or violates a documented precondition."""


class ConstraintError(InputError):
    """Coin parameters ``(x, y)`` do not lie on the class constraint curve.

    Attributes
    ----------
    residual : float
        Value of the constraint polynomial at the offending ``(x, y)``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class RangeError(InputError):
    """Coin parameter ``x`` lies outside the admissible interval of its class."""


class NumericalError(WalkError, ArithmeticError):
    """A numerical routine failed to reach its stated accuracy."""


class CapacityError(WalkError, OverflowError):
    """A request exceeds the sizes the exact-integer routines are meant for."""
