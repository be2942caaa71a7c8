"""Truncated SVD of MSR matrices and the subspace-migration imaging functional.

For each frequency, the functional correlates normalized steering vectors
against the retained singular pairs:

    value(z) = | sum_k omega_k^n sum_m (W_E(z)^* U_m) (W_F(z)^* conj(V_m)) |.

The steering vectors come in two flavors: a plain exponential mode, and a
mode whose amplitudes weight each direction d by phi . [1, d] for a chosen
3-vector phi. Singular values are kept while sigma_m >= tau_rel * sigma_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSteeringError, DomainError, NumericalError
from .forward_model import DirectionSet, MsrMatrix


@dataclass(frozen=True)
class SteeringMode:
    """Steering amplitude selection: plain exponentials or phi-weighted."""

    phi: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.phi is not None:
            phi = tuple(float(c) for c in self.phi)
            if not any(c != 0.0 for c in phi):
                raise DomainError("phi must be a nonzero 3-vector")
            if len(phi) != 3:
                raise DomainError("phi must have exactly three components")
            object.__setattr__(self, "phi", phi)

    @classmethod
    def plain(cls) -> "SteeringMode":
        return cls(phi=None)

    @classmethod
    def phi_weighted(cls, phi) -> "SteeringMode":
        return cls(phi=tuple(float(c) for c in phi))

    @property
    def label(self) -> str:
        if self.phi is None:
            return "plain"
        return "phi" + "".join(f"{c:g}" for c in self.phi)


@dataclass
class TruncatedSvd:
    """Full SVD of one MSR matrix plus the relative-threshold cut."""

    omega: float
    sigmas: np.ndarray  # descending
    left: np.ndarray  # (P, r) columns U_m
    right: np.ndarray  # (Q, r) columns V_m
    m_count: int
    _signal_outer: np.ndarray | None = field(default=None, repr=False)

    def signal_outer(self) -> np.ndarray:
        """sum_m U_m V_m^H over the retained pairs (P x Q, cached)."""
        if self._signal_outer is None:
            m = self.m_count
            self._signal_outer = self.left[:, :m] @ self.right[:, :m].conj().T
        return self._signal_outer


def truncated_svd(matrix: MsrMatrix, tau_rel: float) -> TruncatedSvd:
    """SVD with singular pairs kept while sigma_m >= tau_rel * sigma_1."""
    if not (0.0 < tau_rel < 1.0):
        raise DomainError("relative threshold must lie in (0, 1)")
    u, s, vh = np.linalg.svd(matrix.entries, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        m_count = 0
    else:
        m_count = int(np.sum(s >= tau_rel * s[0]))
    return TruncatedSvd(
        omega=matrix.omega, sigmas=s, left=u, right=vh.conj().T, m_count=m_count
    )


def _steering_amplitudes(directions: np.ndarray, mode: SteeringMode) -> np.ndarray:
    if mode.phi is None:
        return np.ones(directions.shape[0])
    phi = np.asarray(mode.phi)
    return phi[0] + directions @ phi[1:]


def steering_vectors(
    z, omega: float, dirs: DirectionSet, mode: SteeringMode
) -> tuple[np.ndarray, np.ndarray]:
    """Unit steering vectors (W_E, W_F) at search point z.

    Receiver entries carry exp(-i omega v_p . z), incident entries
    exp(+i omega t_q . z); in plain mode the normalizations are exactly
    1/sqrt(P) and 1/sqrt(Q).
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("search point must be finite")
    e = _steering_amplitudes(dirs.receivers, mode) * np.exp(
        -1j * omega * (dirs.receivers @ z)
    )
    f = _steering_amplitudes(dirs.incidents, mode) * np.exp(
        1j * omega * (dirs.incidents @ z)
    )
    e_norm = np.linalg.norm(e)
    f_norm = np.linalg.norm(f)
    if e_norm < 1e-12 or f_norm < 1e-12:
        raise DegenerateSteeringError(
            "steering vector has zero norm; phi is orthogonal to every direction"
        )
    return e / e_norm, f / f_norm


def point_target_matrix(
    z0, omega: float, dirs: DirectionSet, mode: SteeringMode
) -> MsrMatrix:
    """Rank-1 synthetic target E(z0) F(z0)^T.

    Its singular vectors reproduce the steering vectors at z0: U_1 is a
    phase multiple of W_E(z0) and conj(V_1) the matching multiple of
    W_F(z0), so the functional evaluates to 1 there per frequency.
    """
    z0 = np.asarray(z0, dtype=float)
    e = _steering_amplitudes(dirs.receivers, mode) * np.exp(
        -1j * omega * (dirs.receivers @ z0)
    )
    f = _steering_amplitudes(dirs.incidents, mode) * np.exp(
        1j * omega * (dirs.incidents @ z0)
    )
    return MsrMatrix(omega=float(omega), entries=np.outer(e, f))


def _check_svds(svds, dirs: DirectionSet) -> None:
    if not svds:
        raise DomainError("need at least one decomposed frequency")
    for svd in svds:
        if svd.left.shape[0] != dirs.p_count or svd.right.shape[0] != dirs.q_count:
            raise DomainError("SVD dimensions do not match the direction set")
    if all(svd.m_count == 0 for svd in svds):
        raise NumericalError("empty signal subspace at every frequency")


def functional_value(z, svds, dirs: DirectionSet, mode: SteeringMode, n: int = 0) -> float:
    """Imaging functional at a single search point with weight exponent n."""
    if n < 0:
        raise DomainError("weight exponent must be nonnegative")
    _check_svds(svds, dirs)
    total = 0.0 + 0.0j
    for svd in svds:
        if svd.m_count == 0:
            continue
        w_e, w_f = steering_vectors(z, svd.omega, dirs, mode)
        total += svd.omega**n * (w_e.conj() @ svd.signal_outer() @ w_f.conj())
    return float(abs(total))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular search grid; values are evaluated at cell centers."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int

    def cell_size(self) -> tuple[float, float]:
        return (self.x_hi - self.x_lo) / self.nx, (self.y_hi - self.y_lo) / self.ny

    def x_centers(self) -> np.ndarray:
        dx = (self.x_hi - self.x_lo) / self.nx
        return self.x_lo + dx * (np.arange(self.nx) + 0.5)

    def y_centers(self) -> np.ndarray:
        dy = (self.y_hi - self.y_lo) / self.ny
        return self.y_lo + dy * (np.arange(self.ny) + 0.5)

    def cell_centers(self) -> np.ndarray:
        """All centers as an (nx * ny, 2) array, x-major order."""
        xs = self.x_centers()
        ys = self.y_centers()
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])


DEFAULT_GRID = GridSpec(x_lo=-1.1, x_hi=1.1, y_lo=-1.1, y_hi=1.1, nx=128, ny=128)


@dataclass
class ImageMap:
    """|functional| sampled over a grid; values[i, j] belongs to (x_i, y_j)."""

    grid: GridSpec
    values: np.ndarray  # (nx, ny), nonnegative
    n: int
    k_count: int
    mode_label: str

    def normalized(self) -> np.ndarray:
        peak = float(self.values.max())
        if peak == 0.0:
            return self.values.copy()
        return self.values / peak

    def peak_location(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.grid.x_centers()[i]), float(self.grid.y_centers()[j])


def _frequency_cell_terms(svds, dirs: DirectionSet, mode: SteeringMode, cells: np.ndarray):
    """Per-frequency complex correlation at each cell, shape (K, n_cells)."""
    terms = np.zeros((len(svds), cells.shape[0]), dtype=complex)
    amp_r = _steering_amplitudes(dirs.receivers, mode)
    amp_i = _steering_amplitudes(dirs.incidents, mode)
    for k, svd in enumerate(svds):
        if svd.m_count == 0:
            continue
        w_e = amp_r * np.exp(-1j * svd.omega * (cells @ dirs.receivers.T))
        w_f = amp_i * np.exp(1j * svd.omega * (cells @ dirs.incidents.T))
        e_norms = np.linalg.norm(w_e, axis=1)
        f_norms = np.linalg.norm(w_f, axis=1)
        if np.any(e_norms < 1e-12) or np.any(f_norms < 1e-12):
            raise DegenerateSteeringError("steering vector has zero norm on the grid")
        projected = w_e.conj() @ svd.signal_outer()  # (cells, Q)
        terms[k] = np.einsum("cq,cq->c", projected, w_f.conj()) / (e_norms * f_norms)
    return terms


def compute_images(
    svds, dirs: DirectionSet, mode: SteeringMode, n_weights, grid: GridSpec
) -> dict[int, ImageMap]:
    """Evaluate the functional over the grid for several weight exponents.

    The per-frequency correlations are shared across exponents, so asking
    for more than one n costs almost nothing extra.
    """
    if grid.nx < 2 or grid.ny < 2:
        raise DomainError("grid must have at least 2 cells per axis")
    _check_svds(svds, dirs)
    cells = grid.cell_centers()
    terms = _frequency_cell_terms(svds, dirs, mode, cells)
    omegas = np.array([svd.omega for svd in svds])
    images = {}
    for n in n_weights:
        if n < 0:
            raise DomainError("weight exponent must be nonnegative")
        values = np.abs((omegas[:, None] ** n * terms).sum(axis=0))
        images[int(n)] = ImageMap(
            grid=grid,
            values=values.reshape(grid.nx, grid.ny),
            n=int(n),
            k_count=len(svds),
            mode_label=mode.label,
        )
    return images


def compute_image(
    svds, dirs: DirectionSet, mode: SteeringMode, n: int, grid: GridSpec
) -> ImageMap:
    """Single-exponent convenience wrapper around compute_images."""
    return compute_images(svds, dirs, mode, [n], grid)[int(n)]


def compute_radial_profile(
    svds,
    dirs: DirectionSet,
    mode: SteeringMode,
    n: int,
    radii: np.ndarray,
    center=(0.0, 0.0),
    n_angles: int = 16,
) -> np.ndarray:
    """Azimuthal average of the functional on circles around a center point."""
    center = np.asarray(center, dtype=float)
    radii = np.asarray(radii, dtype=float)
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    out = np.empty(radii.shape[0])
    for idx, r in enumerate(radii):
        if r == 0.0:
            out[idx] = functional_value(center, svds, dirs, mode, n)
        else:
            out[idx] = float(
                np.mean(
                    [functional_value(center + r * d, svds, dirs, mode, n) for d in ring]
                )
            )
    return out


def image_to_csv(image: ImageMap, path) -> None:
    """Write 'x,y,value' rows with values scaled so the peak is 1."""
    xs = image.grid.x_centers()
    ys = image.grid.y_centers()
    normalized = image.normalized()
    lines = ["x,y,value"]
    for i in range(image.grid.nx):
        for j in range(image.grid.ny):
            lines.append(f"{xs[i]:.17g},{ys[j]:.17g},{normalized[i, j]:.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def image_to_pgm(image: ImageMap, path) -> None:
    """8-bit binary PGM, row-major with the top row at the largest y."""
    normalized = image.normalized()
    # rows run from max y down; columns from min x up
    raster = np.flip(normalized.T, axis=0)
    pixels = np.round(255.0 * raster).astype(np.uint8)
    header = f"P5\n{image.grid.nx} {image.grid.ny}\n255\n".encode("ascii")
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(pixels.tobytes())


def map_basename(tag: str, n: int, k_count: int) -> str:
    """Canonical export stem: <tag>_n<weight>_K<count>."""
    return f"{tag}_n{n}_K{k_count}"
