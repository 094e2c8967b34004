"""Exception types raised by the toolkit."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function (e.g. a gamma pole)."""


class ValidationError(ValueError):
    """Invalid problem data: grid, coefficients, order or configuration."""


class ConvergenceError(RuntimeError):
    """Iterative eigensolver did not reach its tolerance."""

    def __init__(self, message, off_norm=float("nan"), sweeps=0):
        super().__init__(message)
        self.off_norm = off_norm
        self.sweeps = sweeps
