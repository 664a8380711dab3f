"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class TruncationError(RuntimeError):
    """Raised when population reaches the edge of a truncated Fock space."""

    def __init__(self, message, leakage):
        super().__init__(message)
        self.leakage = leakage


class ChainResidualError(RuntimeError):
    """Raised when an evolved state has weight outside its four-state chain."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
