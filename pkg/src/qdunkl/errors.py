"""Exception types shared across the package."""


class QDomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OutOfOperatorDomainError(QDomainError):
    """Operator evaluation requested at x >= x_rad = 1/(1-q^n), where the
    defining series diverges.  Closed-form / continued quantities remain
    available there; raw series evaluation does not."""

    def __init__(self, x: float, x_radius: float, detail: str = ""):
        self.x = x
        self.x_radius = x_radius
        msg = (f"operator series diverges at x={x:.6g} "
               f"(convergence requires x < x_rad={x_radius:.6g})")
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SeriesOverflowError(OverflowError):
    """A series value left the double-precision range; carries the index k
    at which the failure occurred."""

    def __init__(self, what: str, k: int):
        self.k = k
        super().__init__(f"{what} exceeds floating-point range at k={k}")


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 2)."""
