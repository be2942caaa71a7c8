"""Direction sets, synthetic MSR matrices, and reproducible measurement noise.

The matrix entry for receiver direction v_j and incident direction t_l is

    A_jl = omega^2 * integral over the curve of
           {(eps - eps0)/sqrt(eps0 mu0) + v_j . M(x) . t_l}
           * exp(-i omega (v_j - t_l) . x)  d(arc length),

evaluated with trapezoid arc-length quadrature. The synthetic data always
uses this continuous integral; the coarser per-segment point sum (one point
per half wavelength) is provided separately for the factorization and rank
analysis so the imaging side is never tested against its own discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    Background,
    InclusionSpec,
    arc_length,
    curve_arrays,
    equal_arclength_frames,
    polarization_eigenvalues,
    rayleigh_point_count,
)

_CHUNK = 4096


@dataclass(frozen=True)
class DirectionSet:
    """Receiver and incident unit vectors, equally spread on the unit circle."""

    receivers: np.ndarray  # (P, 2)
    incidents: np.ndarray  # (Q, 2)

    @property
    def p_count(self) -> int:
        return self.receivers.shape[0]

    @property
    def q_count(self) -> int:
        return self.incidents.shape[0]


@dataclass(frozen=True)
class FrequencySet:
    """Strictly increasing angular frequencies."""

    omegas: np.ndarray

    @property
    def k_count(self) -> int:
        return self.omegas.shape[0]


@dataclass
class MsrMatrix:
    """Complex P x Q multi-static response matrix at one frequency."""

    omega: float
    entries: np.ndarray


@dataclass(frozen=True)
class NoiseSpec:
    """White-noise level in dB plus the counter-based generator seed."""

    snr_db: float
    seed: int


def make_directions(p_count: int, q_count: int) -> DirectionSet:
    """Receivers at angles 2 pi j / P (j = 1..P); incidents are the negated pattern."""
    if p_count < 3 or q_count < 3:
        raise DomainError("need at least three receivers and three incident directions")
    j = np.arange(1, p_count + 1)
    receivers = np.column_stack(
        [np.cos(2 * np.pi * j / p_count), np.sin(2 * np.pi * j / p_count)]
    )
    l = np.arange(1, q_count + 1)
    incidents = -np.column_stack(
        [np.cos(2 * np.pi * l / q_count), np.sin(2 * np.pi * l / q_count)]
    )
    return DirectionSet(receivers=receivers, incidents=incidents)


def make_frequencies(
    k_count: int, lambda_lo: float, lambda_hi: float, spacing: str = "uniform-omega"
) -> FrequencySet:
    """K frequencies spanning [2 pi / lambda_hi, 2 pi / lambda_lo].

    K = 1 takes the midpoint of the range in the chosen spacing coordinate,
    so a single-frequency run over wavelengths [0.3, 0.7] with uniform-lambda
    spacing lands on wavelength 0.5.
    """
    if k_count < 1:
        raise DomainError("need at least one frequency")
    if not (0.0 < lambda_lo < lambda_hi):
        raise DomainError("wavelengths must satisfy 0 < lambda_lo < lambda_hi")
    if spacing == "uniform-omega":
        lo = 2 * math.pi / lambda_hi
        hi = 2 * math.pi / lambda_lo
        if k_count == 1:
            omegas = np.array([0.5 * (lo + hi)])
        else:
            omegas = np.linspace(lo, hi, k_count)
    elif spacing == "uniform-lambda":
        if k_count == 1:
            lams = np.array([0.5 * (lambda_lo + lambda_hi)])
        else:
            lams = np.linspace(lambda_hi, lambda_lo, k_count)
        omegas = 2 * math.pi / lams
    else:
        raise DomainError(f"unknown spacing {spacing!r}")
    return FrequencySet(omegas=omegas)


def _as_inclusion_list(spec) -> list[InclusionSpec]:
    if isinstance(spec, InclusionSpec):
        return [spec]
    return list(spec)


def assemble_msr(
    spec,
    bg: Background,
    dirs: DirectionSet,
    omega: float,
    quad_count: int = 400,
) -> MsrMatrix:
    """Trapezoid-quadrature MSR matrix; accepts one inclusion or a sequence.

    Contributions from multiple inclusions are summed, each with its own
    contrast. Convergence in quad_count is second order.
    """
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError("frequency must be positive")
    if quad_count < 50:
        raise DomainError("quadrature needs at least 50 samples")
    recv = dirs.receivers
    inc = dirs.incidents
    entries = np.zeros((dirs.p_count, dirs.q_count), dtype=complex)
    for inclusion in _as_inclusion_list(spec):
        pts, taus, etas, weights = curve_arrays(inclusion.curve, quad_count)
        c0 = (inclusion.eps - bg.eps0) / math.sqrt(bg.eps0 * bg.mu0)
        along, across = polarization_eigenvalues(bg, inclusion)
        for start in range(0, len(weights), _CHUNK):
            sl = slice(start, start + _CHUNK)
            p = pts[sl]
            phase_r = np.exp(-1j * omega * (recv @ p.T))  # (P, S)
            phase_i = np.exp(1j * omega * (p @ inc.T))  # (S, Q)
            rt = recv @ taus[sl].T  # (P, S)
            re = recv @ etas[sl].T
            it = taus[sl] @ inc.T  # (S, Q)
            ie = etas[sl] @ inc.T
            coupling = along * rt[:, :, None] * it[None, :, :] + across * re[
                :, :, None
            ] * ie[None, :, :]
            entries += np.einsum(
                "js,jsl,sl,s->jl", phase_r, c0 + coupling, phase_i, weights[sl]
            )
    entries *= omega**2
    return MsrMatrix(omega=float(omega), entries=entries)


def assemble_msr_rayleigh(
    spec: InclusionSpec,
    bg: Background,
    dirs: DirectionSet,
    omega: float,
    m: int | None = None,
) -> MsrMatrix:
    """Per-segment point approximation: one sample per half-wavelength segment.

    This is the discrete model the factorization and the rank bound are
    stated for, kept separate from the quadrature data in assemble_msr.
    """
    if m is None:
        m = rayleigh_point_count(spec.curve, omega)
    frames = equal_arclength_frames(spec.curve, m)
    c0 = (spec.eps - bg.eps0) / math.sqrt(bg.eps0 * bg.mu0)
    along, across = polarization_eigenvalues(bg, spec)
    length = arc_length(spec.curve)
    recv = dirs.receivers
    inc = dirs.incidents
    entries = np.zeros((dirs.p_count, dirs.q_count), dtype=complex)
    for frame in frames:
        phase_r = np.exp(-1j * omega * (recv @ frame.point))  # (P,)
        phase_i = np.exp(1j * omega * (inc @ frame.point))  # (Q,)
        rt = recv @ frame.tangent
        re = recv @ frame.normal
        it = inc @ frame.tangent
        ie = inc @ frame.normal
        kernel = c0 + along * np.outer(rt, it) + across * np.outer(re, ie)
        entries += kernel * np.outer(phase_r, phase_i)
    entries *= omega**2 * length / m
    return MsrMatrix(omega=float(omega), entries=entries)


def factorization_blocks(
    spec: InclusionSpec,
    bg: Background,
    dirs: DirectionSet,
    omega: float,
    m: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Blocks (B, D, H) whose product equals the per-segment point matrix.

    B is P x 3M with per-point columns [1, v.tau, v.eta] scaled by the
    receiver phase and H is 3M x Q with the analogous incident rows. Because
    those blocks carry frame components, the 2x2 contrast block of D is the
    polarization tensor expressed in its own eigenbasis, diag(along, across);
    the scalar block is (eps - eps0)/sqrt(eps0 mu0). All blocks carry the
    common factor omega^2 length / M.
    """
    if m is None:
        m = rayleigh_point_count(spec.curve, omega)
    frames = equal_arclength_frames(spec.curve, m)
    c0 = (spec.eps - bg.eps0) / math.sqrt(bg.eps0 * bg.mu0)
    along, across = polarization_eigenvalues(bg, spec)
    length = arc_length(spec.curve)
    recv = dirs.receivers
    inc = dirs.incidents
    b_blocks = []
    h_blocks = []
    d = np.zeros((3 * m, 3 * m))
    scale = omega**2 * length / m
    for idx, frame in enumerate(frames):
        phase_r = np.exp(-1j * omega * (recv @ frame.point))
        phase_i = np.exp(1j * omega * (inc @ frame.point))
        b_blocks.append(
            np.column_stack(
                [phase_r, (recv @ frame.tangent) * phase_r, (recv @ frame.normal) * phase_r]
            )
        )
        h_blocks.append(
            np.vstack(
                [phase_i, (inc @ frame.tangent) * phase_i, (inc @ frame.normal) * phase_i]
            )
        )
        d[3 * idx, 3 * idx] = scale * c0
        d[3 * idx + 1, 3 * idx + 1] = scale * along
        d[3 * idx + 2, 3 * idx + 2] = scale * across
    return np.hstack(b_blocks), d, np.vstack(h_blocks)


def add_awgn(matrix: MsrMatrix, noise: NoiseSpec) -> MsrMatrix:
    """Add circular complex Gaussian noise at the requested SNR.

    Per-entry noise variance is mean(|A|^2) / 10^(snr_db/10), split evenly
    between the real and imaginary parts. The generator is the counter-based
    Philox stream keyed by the seed, so equal seeds give bit-equal output.
    """
    entries = matrix.entries
    if not np.all(np.isfinite(entries.real)) or not np.all(np.isfinite(entries.imag)):
        raise DomainError("matrix entries must be finite")
    power = float(np.mean(np.abs(entries) ** 2))
    variance = power / 10.0 ** (noise.snr_db / 10.0)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(noise.seed))))
    draw = rng.standard_normal((2,) + entries.shape)
    perturbation = math.sqrt(variance / 2.0) * (draw[0] + 1j * draw[1])
    return MsrMatrix(omega=matrix.omega, entries=entries + perturbation)


def msr_to_csv(matrix: MsrMatrix, path) -> None:
    """Write 'P,Q,omega' then one 'j,l,re,im' row per entry (1-based indices).

    Floats carry 17 significant digits, which round-trips float64 exactly.
    """
    p_count, q_count = matrix.entries.shape
    lines = [f"{p_count},{q_count},{matrix.omega:.17g}"]
    for j in range(p_count):
        for l in range(q_count):
            value = matrix.entries[j, l]
            lines.append(f"{j + 1},{l + 1},{value.real:.17g},{value.imag:.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def msr_from_csv(path) -> MsrMatrix:
    """Inverse of msr_to_csv."""
    with open(path, "r", encoding="ascii") as handle:
        header = handle.readline().strip().split(",")
        p_count, q_count = int(header[0]), int(header[1])
        omega = float(header[2])
        entries = np.zeros((p_count, q_count), dtype=complex)
        for line in handle:
            if not line.strip():
                continue
            j, l, re, im = line.strip().split(",")
            entries[int(j) - 1, int(l) - 1] = float(re) + 1j * float(im)
    return MsrMatrix(omega=omega, entries=entries)
