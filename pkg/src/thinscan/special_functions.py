"""Bessel functions of the first kind and the closed forms built from them.

Evaluation strategy for J_nu(t), integer nu in [0, 20]:

* |t| < 16: ascending power series accumulated in extended precision
  (numpy longdouble). The alternating series loses digits through
  cancellation roughly like eps * I_nu(|t|), which stays below 1e-13
  on this range with an 80-bit accumulator.
* |t| >= 16, nu <= 1: Hankel (Stokes) asymptotic expansion with the
  cosine/sine phase split, truncated at its smallest term. Past t = 16
  the optimal truncation error is below 1e-13.
* |t| >= 16, nu >= 2: downward (Miller) recurrence from a start order
  well above both nu and t, normalized with J_0 + 2*sum_k J_{2k} = 1.

The combination keeps the absolute error under 1e-12 for |t| <= 200,
which the closed-form identity checks in this module rely on.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericalError
from .quadrature import adaptive_quadrature

NU_MAX = 20
_SERIES_CUTOFF = 16.0


def _series(nu: int, t: float) -> float:
    # ascending series in longdouble; t is nonnegative and < cutoff
    half = np.longdouble(t) / 2
    term = np.longdouble(1.0)
    for k in range(1, nu + 1):
        term *= half / k
    total = term
    x2 = half * half
    for k in range(1, 200):
        term *= -x2 / (k * (nu + k))
        total += term
        if abs(term) < 1e-25 * max(np.longdouble(1.0), abs(total)) and 2 * k > t:
            break
    return float(total)


def _hankel(nu: int, t: float) -> float:
    # asymptotic expansion for nu in {0, 1}, t >= cutoff; adaptive truncation
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    prev = math.inf
    for k in range(1, 60):
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        if abs(term) >= prev:
            break
        if k % 2 == 1:
            q += term * (-1.0) ** ((k - 1) // 2)
        else:
            p += term * (-1.0) ** (k // 2)
        prev = abs(term)
        if prev < 1e-19:
            break
    chi = t - (2 * nu + 1) * math.pi / 4.0
    return math.sqrt(2.0 / (math.pi * t)) * (p * math.cos(chi) - q * math.sin(chi))


def _miller(nu: int, t: float) -> float:
    # downward recurrence with the even-order sum normalization
    start = int(max(nu, t) + 15.0 * max(t, 1.0) ** (1.0 / 3.0) + 30)
    if start % 2:
        start += 1
    f_up = 0.0
    f_cur = 1e-30
    even_sum = 0.0
    out = f_cur if start == nu else 0.0
    for k in range(start, 0, -1):
        f_down = (2.0 * k / t) * f_cur - f_up
        f_up = f_cur
        f_cur = f_down
        if k - 1 == nu:
            out = f_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            even_sum += 2.0 * f_cur
        if abs(f_cur) > 1e250:
            f_cur *= 1e-250
            f_up *= 1e-250
            even_sum *= 1e-250
            out *= 1e-250
    norm = f_cur + even_sum
    return out / norm


def bessel_j(nu: int, t: float) -> float:
    """J_nu(t) for integer order 0 <= nu <= 20, |error| <= 1e-12 on |t| <= 200."""
    if not isinstance(nu, (int, np.integer)) or nu < 0 or nu > NU_MAX:
        raise DomainError(f"order must be an integer in [0, {NU_MAX}], got {nu!r}")
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("argument must be finite")
    x = abs(t)
    if x == 0.0:
        value = 1.0 if nu == 0 else 0.0
    elif x < _SERIES_CUTOFF:
        value = _series(int(nu), x)
    elif nu <= 1:
        value = _hankel(int(nu), x)
    else:
        value = _miller(int(nu), x)
    if t < 0.0 and nu % 2 == 1:
        value = -value
    return value


def bessel_j_asymptotic(nu: int, t: float) -> float:
    """Leading-order large-argument form sqrt(2/(pi t)) cos(t - nu pi/2 - pi/4).

    Analysis aid only; the imaging code always uses bessel_j.
    """
    if not isinstance(nu, (int, np.integer)) or nu < 0:
        raise DomainError("order must be a nonnegative integer")
    t = float(t)
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError("argument must be positive and finite")
    return math.sqrt(2.0 / (math.pi * t)) * math.cos(t - nu * math.pi / 2.0 - math.pi / 4.0)


def phi(t: float, omega: float) -> float:
    """omega * (J_0(omega t)^2 + J_1(omega t)^2); lies in (0, omega], peak at t = 0."""
    t = float(t)
    omega = float(omega)
    if not (math.isfinite(t) and t >= 0.0):
        raise DomainError("distance must be finite and nonnegative")
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError("frequency must be positive and finite")
    u = omega * t
    return omega * (bessel_j(0, u) ** 2 + bessel_j(1, u) ** 2)


def phi_hat(t: float, omega: float, n: int) -> float:
    """omega^(n+1) * (J_0(omega t)^2 + J_1(omega t)^2) for weight exponent n >= 1."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError("weight exponent must be an integer >= 1; use phi for n = 0")
    return float(omega) ** int(n) * phi(t, omega)


def j0_squared_integral(a: float, b: float, abs_tol: float = 1e-10) -> float:
    """Adaptive quadrature of J_0(t)^2 over [a, b], 0 <= a <= b."""
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or a < 0.0 or a > b:
        raise DomainError("limits must satisfy 0 <= a <= b")
    return adaptive_quadrature(lambda t: bessel_j(0, t) ** 2, a, b, abs_tol)


def j1_squared_integral(a: float, b: float, abs_tol: float = 1e-10) -> float:
    """Adaptive quadrature of J_1(t)^2 over [a, b], 0 <= a <= b."""
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or a < 0.0 or a > b:
        raise DomainError("limits must satisfy 0 <= a <= b")
    return adaptive_quadrature(lambda t: bessel_j(1, t) ** 2, a, b, abs_tol)


def psi_terms(
    t: float, omega_k: float, omega_1: float, s: int
) -> tuple[float, float, float]:
    """The three explicit closed-form terms of the odd-exponent recurrence.

    With u = omega * t:

        psi1 = [omega^(2s+2) / (4s+2) * (J_0(u)^2 + J_1(u)^2)]  evaluated at
               omega_k minus the same at omega_1,
        psi2 = s^2 / ((2s+1) t^2) * (omega_k^(2s) J_0(u_k)^2
               - omega_1^(2s) J_0(u_1)^2),
        psi3 = s / ((2s+1) t) * (omega_k^(2s+1) J_0(u_k) J_1(u_k)
               - omega_1^(2s+1) J_0(u_1) J_1(u_1)).

    psi2 and psi3 divide by t, so t must be positive.
    """
    t = float(t)
    omega_k = float(omega_k)
    omega_1 = float(omega_1)
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise DomainError("s must be an integer >= 1")
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError("t must be positive (psi2 and psi3 divide by t)")
    if not (0.0 < omega_1 <= omega_k):
        raise DomainError("frequencies must satisfy 0 < omega_1 <= omega_k")

    def j01(u: float) -> tuple[float, float]:
        return bessel_j(0, u), bessel_j(1, u)

    j0_hi, j1_hi = j01(omega_k * t)
    j0_lo, j1_lo = j01(omega_1 * t)
    s = int(s)
    psi1 = (
        omega_k ** (2 * s + 2) / (4 * s + 2) * (j0_hi**2 + j1_hi**2)
        - omega_1 ** (2 * s + 2) / (4 * s + 2) * (j0_lo**2 + j1_lo**2)
    )
    psi2 = (
        s**2
        / ((2 * s + 1) * t**2)
        * (omega_k ** (2 * s) * j0_hi**2 - omega_1 ** (2 * s) * j0_lo**2)
    )
    psi3 = (
        s / ((2 * s + 1) * t) * omega_k ** (2 * s + 1) * j0_hi * j1_hi
        - s / ((2 * s + 1) * t) * omega_1 ** (2 * s + 1) * j0_lo * j1_lo
    )
    return psi1, psi2, psi3


def oscillatory_bessel_integral(
    a: float,
    b: float,
    nu: int = 0,
    tail_tol: float = 1e-4,
    max_half_periods: int = 600,
) -> complex:
    """Oracle for the conditionally convergent integral of e^(iat) J_nu(bt).

    Requires 0 <= a < b, where the integral equals
    (cos(nu asin(a/b)) + i sin(nu asin(a/b))) / sqrt(b^2 - a^2).

    Partial integrals are taken at half-period cutoffs T_j = pi j / max(a, b)
    and damped by repeated pairwise averaging of the cutoff sequence; the
    procedure stops once two successive damped estimates agree to tail_tol.
    Accuracy degrades as a approaches b (the integral develops a 1/sqrt
    singularity), so keep a/b moderate.
    """
    a = float(a)
    b = float(b)
    if not isinstance(nu, (int, np.integer)) or nu < 0 or nu > NU_MAX:
        raise DomainError(f"order must be an integer in [0, {NU_MAX}]")
    if not (math.isfinite(a) and math.isfinite(b)) or not (0.0 <= a < b):
        raise DomainError("coefficients must satisfy 0 <= a < b")
    half_period = math.pi / max(a, b)
    running = 0.0 + 0.0j
    partials: list[complex] = []
    prev_est: complex | None = None
    for j in range(1, max_half_periods + 1):
        lo = (j - 1) * half_period
        hi = j * half_period
        re = adaptive_quadrature(lambda t: math.cos(a * t) * bessel_j(nu, b * t), lo, hi, 1e-10)
        im = adaptive_quadrature(lambda t: math.sin(a * t) * bessel_j(nu, b * t), lo, hi, 1e-10)
        running += re + 1j * im
        partials.append(running)
        if len(partials) < 4:
            continue
        row = np.asarray(partials, dtype=complex)
        for _ in range(min(len(row) - 1, 30)):
            row = 0.5 * (row[1:] + row[:-1])
        est = complex(row[-1])
        if prev_est is not None and abs(est - prev_est) < tail_tol:
            return est
        prev_est = est
    raise NumericalError(
        f"oscillatory integral tail estimate did not reach {tail_tol} "
        f"within {max_half_periods} half-periods (a={a}, b={b}, nu={nu})"
    )
