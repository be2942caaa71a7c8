"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateCurveError(ValueError):
    """A supporting curve has a vanishing derivative, so no frame exists there."""


class DegenerateSteeringError(ValueError):
    """A steering vector has zero norm and cannot be normalized."""


class NumericalError(RuntimeError):
    """An iterative numerical procedure failed to reach its tolerance."""


class ConfigError(ValueError):
    """An experiment configuration violates one or more invariants."""
