"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(ValueError):
    """An argument lies outside the supported or tabulated range."""


class ToleranceError(ArithmeticError):
    """A numerical procedure did not reach its requested tolerance.

    The achieved error estimate is kept in ``residual``.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


class InfeasibleBetaError(DomainError):
    """The spectral moment condition required for a Hoelder exponent fails."""


class InvalidPhiError(ValueError):
    """A user supplied function is not an Orlicz N-function."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
