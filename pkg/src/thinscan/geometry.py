"""Supporting curves, local frames, and the thin-inclusion polarization tensor.

A thin inclusion is a tube of half-thickness h around a smooth parametric
curve x(z) = [f(z), g(z)]. Curves are either polynomial graphs (coefficient
arrays for f and g, ascending order) or point lists sampled uniformly in
parameter. The unit normal is the tangent rotated +90 degrees; the MSR
integrand only uses the normal through an outer product, so orientation is
immaterial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurveError, DomainError

_ARC_SAMPLES = 4001


@dataclass(frozen=True)
class SupportingCurve:
    """Parametric curve x(z) = [f(z), g(z)] over [z_lo, z_hi]."""

    kind: str
    f_coeffs: tuple[float, ...] | None = None
    g_coeffs: tuple[float, ...] | None = None
    z_range: tuple[float, float] = (0.0, 1.0)
    points: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in ("polynomial-graph", "point-list"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "polynomial-graph":
            if not self.f_coeffs or not self.g_coeffs:
                raise ValueError("polynomial-graph curves need f and g coefficients")
        else:
            if self.points is None or len(self.points) < 2:
                raise ValueError("point-list curves need at least two points")
            object.__setattr__(
                self, "points", np.asarray(self.points, dtype=float).reshape(-1, 2)
            )

    @classmethod
    def polynomial(cls, f_coeffs, g_coeffs, z_range) -> "SupportingCurve":
        return cls(
            kind="polynomial-graph",
            f_coeffs=tuple(float(c) for c in f_coeffs),
            g_coeffs=tuple(float(c) for c in g_coeffs),
            z_range=(float(z_range[0]), float(z_range[1])),
        )

    @classmethod
    def from_points(cls, points, z_range=(0.0, 1.0)) -> "SupportingCurve":
        return cls(
            kind="point-list",
            z_range=(float(z_range[0]), float(z_range[1])),
            points=np.asarray(points, dtype=float),
        )

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Curve points at parameters z, shape (len(z), 2)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "polynomial-graph":
            x = np.polynomial.polynomial.polyval(z, np.asarray(self.f_coeffs))
            y = np.polynomial.polynomial.polyval(z, np.asarray(self.g_coeffs))
            return np.column_stack([x, y])
        lo, hi = self.z_range
        base = np.linspace(lo, hi, len(self.points))
        return np.column_stack(
            [np.interp(z, base, self.points[:, 0]), np.interp(z, base, self.points[:, 1])]
        )

    def derivative(self, z: np.ndarray) -> np.ndarray:
        """dx/dz at parameters z; centered finite differences for point lists."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "polynomial-graph":
            fd = np.polynomial.polynomial.polyder(np.asarray(self.f_coeffs))
            gd = np.polynomial.polynomial.polyder(np.asarray(self.g_coeffs))
            return np.column_stack(
                [
                    np.polynomial.polynomial.polyval(z, fd),
                    np.polynomial.polynomial.polyval(z, gd),
                ]
            )
        lo, hi = self.z_range
        base = np.linspace(lo, hi, len(self.points))
        grads = np.gradient(self.points, base, axis=0, edge_order=2)
        return np.column_stack(
            [np.interp(z, base, grads[:, 0]), np.interp(z, base, grads[:, 1])]
        )


@dataclass(frozen=True)
class Background:
    """Homogeneous background material."""

    eps0: float = 1.0
    mu0: float = 1.0


@dataclass(frozen=True)
class InclusionSpec:
    """Thin inclusion: supporting curve, half-thickness, and contrast."""

    curve: SupportingCurve
    h: float
    eps: float
    mu: float


@dataclass(frozen=True)
class FrameSample:
    """One quadrature node on a curve with its orthonormal frame."""

    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    weight: float


def _frames_from_params(curve: SupportingCurve, zs: np.ndarray, weights: np.ndarray):
    pts = curve.evaluate(zs)
    derivs = curve.derivative(zs)
    speeds = np.linalg.norm(derivs, axis=1)
    if np.any(speeds < 1e-12):
        bad = zs[int(np.argmin(speeds))]
        raise DegenerateCurveError(f"curve derivative vanishes near z = {bad:.6g}")
    tangents = derivs / speeds[:, None]
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])
    return pts, tangents, normals, speeds, weights


def curve_arrays(curve: SupportingCurve, count: int):
    """Trapezoid arc-length quadrature arrays: (points, tangents, normals, weights)."""
    if count < 2:
        raise DomainError("need at least two samples")
    lo, hi = curve.z_range
    if not lo < hi:
        raise DomainError("parameter range must satisfy z_lo < z_hi")
    zs = np.linspace(lo, hi, count)
    dz = (hi - lo) / (count - 1)
    pts, tangents, normals, speeds, _ = _frames_from_params(curve, zs, None)
    weights = speeds * dz
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return pts, tangents, normals, weights


def sample_curve(curve: SupportingCurve, count: int) -> list[FrameSample]:
    """Uniform-parameter frames whose weights sum to the trapezoid arc length."""
    pts, tangents, normals, weights = curve_arrays(curve, count)
    return [
        FrameSample(pts[i], tangents[i], normals[i], float(weights[i]))
        for i in range(count)
    ]


def arc_length(curve: SupportingCurve, count: int = _ARC_SAMPLES) -> float:
    """Trapezoid estimate of the curve length."""
    return float(np.sum(curve_arrays(curve, count)[3]))


def equal_arclength_frames(curve: SupportingCurve, m: int) -> list[FrameSample]:
    """m frames at midpoints of equal arc-length segments, each weighted length/m."""
    if m < 1:
        raise DomainError("need at least one segment")
    lo, hi = curve.z_range
    zs = np.linspace(lo, hi, _ARC_SAMPLES)
    speeds = np.linalg.norm(curve.derivative(zs), axis=1)
    dz = (hi - lo) / (_ARC_SAMPLES - 1)
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (speeds[1:] + speeds[:-1]) * dz)])
    total = cumulative[-1]
    targets = (np.arange(m) + 0.5) * total / m
    params = np.interp(targets, cumulative, zs)
    pts, tangents, normals, _, _ = _frames_from_params(curve, params, None)
    w = total / m
    return [FrameSample(pts[i], tangents[i], normals[i], w) for i in range(m)]


def rayleigh_point_count(curve: SupportingCurve, omega: float) -> int:
    """Number of half-wavelength segments resolved on the curve at frequency omega."""
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError("frequency must be positive")
    lam = 2.0 * math.pi / omega
    # guard the exact-integer case against arc-length roundoff
    return max(1, math.ceil(arc_length(curve) / (lam / 2.0) - 1e-12))


def polarization_eigenvalues(bg: Background, spec: InclusionSpec) -> tuple[float, float]:
    """Eigenvalues along the tangent and the normal, in that order."""
    along = 2.0 * (1.0 / spec.mu - 1.0 / bg.mu0)
    across = 2.0 * (1.0 / bg.mu0 - spec.mu / bg.mu0**2)
    return along, across


def polarization_tensor(
    frame: FrameSample, bg: Background, spec: InclusionSpec
) -> np.ndarray:
    """Symmetric 2x2 permeability-contrast tensor with the frame as eigenbasis."""
    along, across = polarization_eigenvalues(bg, spec)
    tau = frame.tangent
    eta = frame.normal
    return along * np.outer(tau, tau) + across * np.outer(eta, eta)
