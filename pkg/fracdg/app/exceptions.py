"""Exception hierarchy shared by the numerical core, services and CLI."""


class FracDGError(Exception):
    """Base class for all solver errors."""


class ConfigError(FracDGError, ValueError):
    """Invalid parameter or configuration value."""

    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(message)
        self.field = field


class DomainError(FracDGError, ValueError):
    """Evaluation outside the supported domain (grid window, basis degree)."""


class NumericalError(FracDGError, ArithmeticError):
    """
    Non-finite or otherwise broken discrete state.

    Args:
        message: Human readable description
        time: Simulation time at which the failure was detected
        cell: Offending cell index, when known
        value: Offending value, when known
    """

    def __init__(
        self,
        message: str,
        time: float | None = None,
        cell: int | None = None,
        value: float | None = None,
    ) -> None:
        super().__init__(message)
        self.time = time
        self.cell = cell
        self.value = value

    def __str__(self) -> str:
        base = super().__str__()
        details = []
        if self.time is not None:
            details.append(f"t={self.time:.6g}")
        if self.cell is not None:
            details.append(f"cell={self.cell}")
        if self.value is not None:
            details.append(f"value={self.value!r}")
        return f"{base} ({', '.join(details)})" if details else base


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message: str, iterations: int, residual: float) -> None:
        super().__init__(message, value=residual)
        self.iterations = iterations
        self.residual = residual
