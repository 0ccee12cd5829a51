"""Exception types shared across the package."""


class N2CharError(Exception):
    """Base class for all package errors."""


class DomainError(N2CharError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(N2CharError, ArithmeticError):
    """Evaluation point too close to a divisor of a meromorphic function."""

    def __init__(self, message: str, distance: float):
        super().__init__(f"{message} (distance {distance:.3e})")
        self.distance = distance


class ConvergenceError(N2CharError, RuntimeError):
    """A truncation or quadrature budget was exhausted before reaching tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class NotInvertibleError(N2CharError, ZeroDivisionError):
    """Formal series whose leading part is not a unit."""
