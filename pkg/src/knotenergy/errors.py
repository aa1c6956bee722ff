"""Exception types shared across the package."""


class InvalidCurveError(ValueError):
    """Vertex data violates the closed-polygon invariants."""

    def __init__(self, message: str, self_intersection: bool = False):
        super().__init__(message)
        self.self_intersection = self_intersection


class InversionSingularityError(ValueError):
    """A vertex lies too close to the inversion center."""


class NumericalDomainError(ArithmeticError):
    """An evaluation left the domain of the Lagrangians (degenerate geometry)."""


class NonTangentialTestFunction(ValueError):
    """A test function fed to the tangential first-variation check is not tangential."""


class ConfigError(ValueError):
    """Bad run configuration (duplicate ids, malformed key=value file, ...)."""
