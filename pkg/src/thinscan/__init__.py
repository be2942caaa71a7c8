"""Subspace-migration imaging toolkit for thin curve-like inclusions.

Synthesizes multi-static response data from the thin-inclusion asymptotic
model, images the supporting curves with plain and frequency-weighted
multi-frequency subspace migration, and verifies the maps against
closed-form Bessel predictors.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateCurveError,
    DegenerateSteeringError,
    DomainError,
    NumericalError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DegenerateCurveError",
    "DegenerateSteeringError",
    "DomainError",
    "NumericalError",
]
