"""Closed-form predictors for the imaging functional and comparison scoring.

For a point-like target at distance r from the search point, the
multi-frequency functional behaves like

    n = 0:   K/(omega_K - omega_1) * (Phi(r; omega_K) - Phi(r; omega_1)
             + integral of J_1(omega r)^2 d omega),
    n >= 1:  K/(omega_K - omega_1) * (PhiHat(r, omega_K; n)
             - PhiHat(r, omega_1; n)),

with Phi(r; w) = w (J_0(wr)^2 + J_1(wr)^2) and PhiHat = w^n Phi. These are
shape statements: amplitudes are compared after normalizing both profiles
by their r = 0 values.

The permeability-only single-frequency image follows a J_1(omega r)^2 law
across the curve, so it dips to zero on the curve and peaks at the first
maximum of J_1 on both sides; that ridge radius is predicted here. Small
incident-direction counts concentrate energy along measurement rays, with
the closed-form ray sum also provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .forward_model import DirectionSet
from .special_functions import bessel_j, j1_squared_integral, phi, phi_hat


@dataclass(frozen=True)
class PredictionConfig:
    """Frequency band, count, weight exponent, and tail handling."""

    omega_1: float
    omega_k: float
    k_count: int
    n: int = 0
    q_count: int = 20
    include_j1_tail: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.omega_1 < self.omega_k):
            raise DomainError("frequencies must satisfy 0 < omega_1 < omega_k")
        if self.k_count < 1:
            raise DomainError("need at least one frequency")
        if self.n < 0:
            raise DomainError("weight exponent must be nonnegative")


@dataclass
class RadialProfile:
    """Values sampled on increasing radii starting at zero."""

    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.shape != self.values.shape:
            raise DomainError("radii and values must have equal length")
        if self.radii[0] != 0.0 or np.any(np.diff(self.radii) <= 0.0):
            raise DomainError("radii must increase strictly from 0")


def predict_plain(r: float, cfg: PredictionConfig) -> float:
    """Unweighted-functional prediction at distance r; returns exactly K at r = 0."""
    if cfg.n != 0:
        raise DomainError("plain prediction requires weight exponent 0")
    r = float(r)
    if not (math.isfinite(r) and r >= 0.0):
        raise DomainError("distance must be finite and nonnegative")
    tail = 0.0
    if cfg.include_j1_tail and r > 0.0:
        tail = j1_squared_integral(cfg.omega_1 * r, cfg.omega_k * r) / r
    span = phi(r, cfg.omega_k) - phi(r, cfg.omega_1) + tail
    return cfg.k_count * (span / (cfg.omega_k - cfg.omega_1))


def predict_weighted(r: float, cfg: PredictionConfig) -> float:
    """Weighted-functional prediction at distance r for exponent n >= 1."""
    if cfg.n < 1:
        raise DomainError("weighted prediction requires exponent >= 1")
    r = float(r)
    if not (math.isfinite(r) and r >= 0.0):
        raise DomainError("distance must be finite and nonnegative")
    span = phi_hat(r, cfg.omega_k, cfg.n) - phi_hat(r, cfg.omega_1, cfg.n)
    return cfg.k_count * (span / (cfg.omega_k - cfg.omega_1))


def predict_profile(radii, cfg: PredictionConfig) -> RadialProfile:
    """Prediction sampled on a radius grid, dispatching on the exponent."""
    radii = np.asarray(radii, dtype=float)
    if cfg.n == 0:
        values = np.array([predict_plain(r, cfg) for r in radii])
    else:
        values = np.array([predict_weighted(r, cfg) for r in radii])
    return RadialProfile(radii=radii, values=values)


def predict_ghost_small_q(z, target, dirs: DirectionSet, clamp_eps: float = 1e-6) -> float:
    """Measurement-ray energy sum for small incident counts.

    Sums 1/sqrt(|d|^2 - (t_q . d)^2) over the incident directions with
    d = z - target. Terms whose radicand falls below clamp_eps (z on a ray
    through the target) are clamped to 1/sqrt(clamp_eps) so maps stay
    renderable along the singular rays.
    """
    d = np.asarray(z, dtype=float) - np.asarray(target, dtype=float)
    dist_sq = float(d @ d)
    if dist_sq == 0.0:
        raise DomainError("search point must differ from the target")
    projections = dirs.incidents @ d
    radicands = np.maximum(dist_sq - projections**2, clamp_eps)
    return float(np.sum(1.0 / np.sqrt(radicands)))


def j1_peak_argument() -> float:
    """First maximum of J_1, located by bisection on its derivative in (1, 2.5)."""
    def deriv(t: float) -> float:
        return bessel_j(0, t) - bessel_j(1, t) / t

    lo, hi = 1.0, 2.5
    f_lo = deriv(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = deriv(mid)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo = mid
            f_lo = f_mid
    return 0.5 * (lo + hi)


def predict_permeability_ghost_radius(omega: float) -> float:
    """Offset of the two permeability ghost ridges from the curve."""
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError("frequency must be positive")
    return j1_peak_argument() / float(omega)


def profile_match_score(computed: RadialProfile, predicted: RadialProfile) -> float:
    """Max absolute gap between the two profiles after r = 0 normalization."""
    if computed.radii.shape != predicted.radii.shape or np.any(
        computed.radii != predicted.radii
    ):
        raise DomainError("profiles must share the same radii")
    c0 = computed.values[0]
    p0 = predicted.values[0]
    if c0 == 0.0 or p0 == 0.0:
        raise DomainError("profiles must be nonzero at r = 0 for normalization")
    return float(np.max(np.abs(computed.values / c0 - predicted.values / p0)))


def profiles_to_csv(computed: RadialProfile, predicted: RadialProfile, path) -> None:
    """Write 'r,computed,predicted,abs_diff' rows for the two profiles."""
    if np.any(computed.radii != predicted.radii):
        raise DomainError("profiles must share the same radii")
    lines = ["r,computed,predicted,abs_diff"]
    for r, c, p in zip(computed.radii, computed.values, predicted.values):
        lines.append(f"{r:.17g},{c:.17g},{p:.17g},{abs(c - p):.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
