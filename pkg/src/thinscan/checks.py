"""Self-contained identity suite for the special-function layer.

Each check exercises one of the closed-form facts the imaging analysis
rests on, using the adaptive quadrature as the independent side. The CLI
exposes the suite as `thinscan bessel-check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import adaptive_quadrature
from .special_functions import (
    bessel_j,
    j0_squared_integral,
    j1_squared_integral,
    oscillatory_bessel_integral,
    phi,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.1e})"


def _check_antiderivative_identity(rng: np.random.Generator, trials: int = 20) -> CheckResult:
    # integral of J0^2 equals t (J0^2 + J1^2) evaluated at the ends plus the
    # integral of J1^2, both sides by independent quadratures
    worst = 0.0
    for _ in range(trials):
        a, b = np.sort(rng.uniform(0.0, 60.0, size=2))
        lhs = j0_squared_integral(a, b)
        boundary = b * (bessel_j(0, b) ** 2 + bessel_j(1, b) ** 2) - a * (
            bessel_j(0, a) ** 2 + bessel_j(1, a) ** 2
        )
        rhs = boundary + j1_squared_integral(a, b)
        worst = max(worst, abs(lhs - rhs))
    return CheckResult("antiderivative identity for J0^2", worst <= 1e-8, worst, 1e-8)


def _check_recurrence(points: int = 200) -> CheckResult:
    worst = 0.0
    for t in np.linspace(0.5, 50.0, points):
        for nu in range(1, 10):
            gap = abs(
                bessel_j(nu - 1, t) + bessel_j(nu + 1, t) - 2 * nu / t * bessel_j(nu, t)
            )
            worst = max(worst, gap)
    return CheckResult("three-term recurrence", worst <= 1e-9, worst, 1e-9)


def _check_phi_bounds(rng: np.random.Generator, trials: int = 200) -> CheckResult:
    worst = 0.0
    ok = True
    for _ in range(trials):
        t = rng.uniform(0.0, 5.0)
        omega = rng.uniform(0.5, 25.0)
        value = phi(t, omega)
        ok &= 0.0 < value <= omega
        if t > 0:
            worst = max(worst, value - omega)
    ok &= phi(0.0, 7.5) == 7.5
    return CheckResult("phi positivity and upper bound", ok, max(worst, 0.0), 0.0)


def _check_weighted_antiderivative() -> CheckResult:
    # d/dt of the closed-form antiderivative of t^3 J0(t)^2 returns the
    # integrand; centered finite differences at sampled points
    def antiderivative(t: float) -> float:
        j0 = bessel_j(0, t)
        j1 = bessel_j(1, t)
        tail = adaptive_quadrature(lambda u: u * bessel_j(0, u) ** 2, 0.0, t, 1e-11)
        return (
            t**4 / 2.0 * (j0**2 + j1**2) + t**2 * j0**2 + t**3 * j0 * j1 - 2.0 * tail
        ) / 3.0

    worst = 0.0
    step = 1e-5  # balances O(step^2) truncation against roundoff
    for t in np.linspace(0.8, 8.0, 24):
        derivative = (antiderivative(t + step) - antiderivative(t - step)) / (2 * step)
        worst = max(worst, abs(derivative - t**3 * bessel_j(0, t) ** 2))
    return CheckResult("odd-weight antiderivative derivative", worst <= 1e-8, worst, 1e-8)


def _check_oscillatory() -> CheckResult:
    worst = 0.0
    for a, b, nu in [(0.0, 1.0, 0), (0.3, 1.0, 0), (0.5, 1.3, 1), (0.0, 2.5, 1)]:
        got = oscillatory_bessel_integral(a, b, nu)
        angle = math.asin(a / b)
        ref = complex(math.cos(nu * angle), math.sin(nu * angle)) / math.sqrt(
            b * b - a * a
        )
        worst = max(worst, abs(got - ref))
    return CheckResult("oscillatory Bessel integral", worst <= 1e-3, worst, 1e-3)


def run_bessel_checks(seed: int = 20260810) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        _check_antiderivative_identity(rng),
        _check_recurrence(),
        _check_phi_bounds(rng),
        _check_weighted_antiderivative(),
        _check_oscillatory(),
    ]
