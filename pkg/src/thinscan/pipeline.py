"""Experiment configuration, validation, orchestration, and artifact export.

A run walks the full chain: synthesize per-frequency MSR matrices, add
measurement noise when requested, decompose, evaluate the imaging
functional for every requested weight exponent, and export maps plus a
metrics summary. Configurations are single JSON documents; the shipped
presets bundle one or more of them per file.

Outputs are deterministic: a config and seed fix every CSV byte-for-byte.
Noise seeds per frequency derive from the experiment seed through a
SeedSequence, so frequency k always sees the same stream.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError
from .forward_model import (
    Background,
    NoiseSpec,
    add_awgn,
    assemble_msr,
    make_directions,
    make_frequencies,
)
from .geometry import InclusionSpec, SupportingCurve, arc_length, curve_arrays
from .imaging import (
    GridSpec,
    ImageMap,
    SteeringMode,
    compute_images,
    compute_radial_profile,
    image_to_csv,
    image_to_pgm,
    map_basename,
    truncated_svd,
)
from .theory import (
    PredictionConfig,
    RadialProfile,
    predict_profile,
    profile_match_score,
    profiles_to_csv,
)

POINT_TARGET_MAX_LENGTH = 0.02
BRIGHT_LEVEL = 0.95
CURVE_RADIUS = 0.05
SIDELOBE_RANGE = (0.3, 1.0)
PROFILE_RADII = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed for one simulate-to-image run."""

    tag: str
    inclusions: tuple[InclusionSpec, ...]
    background: Background
    p_count: int
    q_count: int
    k_count: int
    lambda_lo: float
    lambda_hi: float
    spacing: str = "uniform-omega"
    n_weights: tuple[int, ...] = (0, 1, 2)
    mode: SteeringMode = SteeringMode.phi_weighted((1.0, 0.0, 1.0))
    snr_db: float | None = 10.0
    seed: int = 101
    grid: GridSpec = GridSpec(-1.1, 1.1, -1.1, 1.1, 128, 128)
    tau_rel: float = 0.01
    quad_count: int = 400


def _curve_to_json(curve: SupportingCurve) -> dict:
    if curve.kind == "polynomial-graph":
        return {
            "kind": curve.kind,
            "f_coeffs": list(curve.f_coeffs),
            "g_coeffs": list(curve.g_coeffs),
            "z_range": list(curve.z_range),
        }
    return {
        "kind": curve.kind,
        "points": [list(p) for p in curve.points],
        "z_range": list(curve.z_range),
    }


def _curve_from_json(data: dict) -> SupportingCurve:
    if data["kind"] == "polynomial-graph":
        return SupportingCurve.polynomial(
            data["f_coeffs"], data["g_coeffs"], data["z_range"]
        )
    return SupportingCurve.from_points(data["points"], data.get("z_range", (0.0, 1.0)))


def _mode_to_json(mode: SteeringMode) -> dict:
    if mode.phi is None:
        return {"kind": "plain"}
    return {"kind": "phi-weighted", "phi": list(mode.phi)}


def _mode_from_json(data: dict) -> SteeringMode:
    if data["kind"] == "plain":
        return SteeringMode.plain()
    if data["kind"] == "phi-weighted":
        return SteeringMode.phi_weighted(data["phi"])
    raise ConfigError(f"unknown steering mode kind {data['kind']!r}")


def config_to_json(config: ExperimentConfig) -> dict:
    return {
        "tag": config.tag,
        "inclusions": [
            {
                "curve": _curve_to_json(inc.curve),
                "h": inc.h,
                "eps": inc.eps,
                "mu": inc.mu,
            }
            for inc in config.inclusions
        ],
        "background": {"eps0": config.background.eps0, "mu0": config.background.mu0},
        "P": config.p_count,
        "Q": config.q_count,
        "K": config.k_count,
        "lambda_lo": config.lambda_lo,
        "lambda_hi": config.lambda_hi,
        "spacing": config.spacing,
        "n_weights": list(config.n_weights),
        "mode": _mode_to_json(config.mode),
        "snr_db": config.snr_db,
        "seed": config.seed,
        "grid": {
            "bounds": [
                config.grid.x_lo,
                config.grid.x_hi,
                config.grid.y_lo,
                config.grid.y_hi,
            ],
            "nx": config.grid.nx,
            "ny": config.grid.ny,
        },
        "tau_rel": config.tau_rel,
        "quad_count": config.quad_count,
    }


def config_from_json(data: dict) -> ExperimentConfig:
    bounds = data["grid"]["bounds"]
    return ExperimentConfig(
        tag=str(data["tag"]),
        inclusions=tuple(
            InclusionSpec(
                curve=_curve_from_json(item["curve"]),
                h=float(item["h"]),
                eps=float(item["eps"]),
                mu=float(item["mu"]),
            )
            for item in data["inclusions"]
        ),
        background=Background(
            eps0=float(data["background"]["eps0"]), mu0=float(data["background"]["mu0"])
        ),
        p_count=int(data["P"]),
        q_count=int(data["Q"]),
        k_count=int(data["K"]),
        lambda_lo=float(data["lambda_lo"]),
        lambda_hi=float(data["lambda_hi"]),
        spacing=str(data.get("spacing", "uniform-omega")),
        n_weights=tuple(int(n) for n in data["n_weights"]),
        mode=_mode_from_json(data["mode"]),
        snr_db=None if data.get("snr_db") is None else float(data["snr_db"]),
        seed=int(data["seed"]),
        grid=GridSpec(
            x_lo=float(bounds[0]),
            x_hi=float(bounds[1]),
            y_lo=float(bounds[2]),
            y_hi=float(bounds[3]),
            nx=int(data["grid"]["nx"]),
            ny=int(data["grid"]["ny"]),
        ),
        tau_rel=float(data.get("tau_rel", 0.01)),
        quad_count=int(data.get("quad_count", 400)),
    )


def _curve_self_intersects(curve: SupportingCurve, segments: int = 128) -> bool:
    lo, hi = curve.z_range
    pts = curve.evaluate(np.linspace(lo, hi, segments + 1))
    a = pts[:-1]
    b = pts[1:]

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (
            q[..., 1] - p[..., 1]
        ) * (r[..., 0] - p[..., 0])

    for i in range(segments - 2):
        js = np.arange(i + 2, segments)
        o1 = orient(a[i], b[i], a[js])
        o2 = orient(a[i], b[i], b[js])
        o3 = orient(a[js], b[js], a[i])
        o4 = orient(a[js], b[js], b[i])
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


def validate_config(config: ExperimentConfig) -> list[str]:
    """Collect every violated invariant; an empty list means the config is valid."""
    bad: list[str] = []
    if not config.tag:
        bad.append("tag: must be nonempty")
    if not config.inclusions:
        bad.append("inclusions: need at least one")
    bg = config.background
    if not bg.eps0 > 0:
        bad.append("background.eps0: must be positive")
    if not bg.mu0 > 0:
        bad.append("background.mu0: must be positive")
    for idx, inc in enumerate(config.inclusions):
        name = f"inclusions[{idx}]"
        if not inc.h > 0:
            bad.append(f"{name}.h: must be positive")
        if not inc.eps > 0:
            bad.append(f"{name}.eps: must be positive")
        if not inc.mu > 0:
            bad.append(f"{name}.mu: must be positive")
        if inc.eps == bg.eps0 and inc.mu == bg.mu0:
            bad.append(f"{name}: needs permittivity or permeability contrast")
        lo, hi = inc.curve.z_range
        if not lo < hi:
            bad.append(f"{name}.curve.z_range: must satisfy z_lo < z_hi")
            continue
        try:
            curve_arrays(inc.curve, 512)
        except Exception as exc:
            bad.append(f"{name}.curve: {exc}")
            continue
        if _curve_self_intersects(inc.curve):
            bad.append(f"{name}.curve: self-intersects on its range")
    if config.p_count < 3:
        bad.append("P: need at least 3 receiver directions")
    if config.q_count < 3:
        bad.append("Q: need at least 3 incident directions")
    if config.k_count < 1:
        bad.append("K: need at least one frequency")
    if not config.lambda_lo > 0:
        bad.append("lambda_lo: must be positive")
    elif not config.lambda_lo < config.lambda_hi:
        bad.append("lambda_lo/lambda_hi: must satisfy lambda_lo < lambda_hi")
    if config.spacing not in ("uniform-omega", "uniform-lambda"):
        bad.append("spacing: must be uniform-omega or uniform-lambda")
    if not config.n_weights:
        bad.append("n_weights: need at least one exponent")
    elif any(n < 0 for n in config.n_weights):
        bad.append("n_weights: exponents must be nonnegative")
    if config.mode.phi is not None and not any(c != 0.0 for c in config.mode.phi):
        bad.append("mode.phi: must be nonzero")
    if config.grid.nx < 2 or config.grid.ny < 2:
        bad.append("grid: need at least 2 cells per axis")
    if not (config.grid.x_lo < config.grid.x_hi and config.grid.y_lo < config.grid.y_hi):
        bad.append("grid.bounds: must be ordered")
    if not 0.0 < config.tau_rel < 1.0:
        bad.append("tau_rel: must lie in (0, 1)")
    if config.quad_count < 50:
        bad.append("quad_count: need at least 50 quadrature samples")
    if config.seed < 0:
        bad.append("seed: must be nonnegative")
    return bad


def curve_distance_field(grid: GridSpec, inclusions, samples: int = 1024) -> np.ndarray:
    """Distance from every cell center to the nearest inclusion curve, (nx*ny,)."""
    curve_pts = np.vstack(
        [curve_arrays(inc.curve, samples)[0] for inc in inclusions]
    )
    cells = grid.cell_centers()
    out = np.empty(cells.shape[0])
    step = 2048
    for start in range(0, cells.shape[0], step):
        block = cells[start : start + step]
        d = np.sqrt(
            ((block[:, None, :] - curve_pts[None, :, :]) ** 2).sum(axis=2)
        )
        out[start : start + step] = d.min(axis=1)
    return out


def bright_fraction_near_curve(
    image: ImageMap,
    distances: np.ndarray,
    level: float = BRIGHT_LEVEL,
    radius: float = CURVE_RADIUS,
) -> float:
    """Fraction of cells at or above level * peak that lie within radius of a curve."""
    normalized = image.normalized().ravel()
    bright = normalized >= level
    if not np.any(bright):
        return 0.0
    return float(np.mean(distances[bright] <= radius))


def sidelobe_mean(image: ImageMap, distances: np.ndarray) -> float:
    """Mean normalized intensity over cells at curve distance in the sidelobe band."""
    lo, hi = SIDELOBE_RANGE
    mask = (distances >= lo) & (distances <= hi)
    if not np.any(mask):
        raise DomainError("sidelobe band contains no grid cells")
    return float(np.mean(image.normalized().ravel()[mask]))


def _is_point_target(config: ExperimentConfig) -> bool:
    if len(config.inclusions) != 1 or config.k_count < 2:
        return False
    return arc_length(config.inclusions[0].curve) < POINT_TARGET_MAX_LENGTH


def _frequency_noise_seeds(seed: int, k_count: int) -> list[int]:
    state = np.random.SeedSequence(int(seed)).generate_state(k_count, dtype=np.uint64)
    return [int(s) for s in state]


@dataclass
class RunManifest:
    """Provenance of one run: config hash, versions, outputs, stage timing."""

    tag: str
    config_hash: str
    seed: int
    versions: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def write(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            json.dump(asdict(self), handle, indent=2, sort_keys=True)
            handle.write("\n")


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_json(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def simulate_matrices(config: ExperimentConfig):
    """Per-frequency MSR matrices with the configured noise applied."""
    dirs, matrices = _simulate_clean(config)
    return dirs, _apply_noise(config, matrices)


def run_experiment(config: ExperimentConfig, out_dir) -> RunManifest:
    """Full pipeline for one config; writes maps, metrics, and a manifest."""
    violations = validate_config(config)
    if violations:
        raise ConfigError("; ".join(violations))
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)

    manifest = RunManifest(
        tag=config.tag,
        config_hash=config_hash(config),
        seed=config.seed,
        versions={
            "thinscan": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
    )
    timings: dict[str, float] = {}

    started = time.perf_counter()
    dirs, noisefree = _simulate_clean(config)
    timings["simulate"] = time.perf_counter() - started

    started = time.perf_counter()
    matrices = _apply_noise(config, noisefree)
    timings["noise"] = time.perf_counter() - started

    started = time.perf_counter()
    svds = [truncated_svd(mat, config.tau_rel) for mat in matrices]
    timings["svd"] = time.perf_counter() - started

    started = time.perf_counter()
    images = compute_images(svds, dirs, config.mode, config.n_weights, config.grid)
    timings["image"] = time.perf_counter() - started

    started = time.perf_counter()
    distances = curve_distance_field(config.grid, config.inclusions)
    metrics: dict = {
        "tag": config.tag,
        "k_count": config.k_count,
        "mode": config.mode.label,
        "seed": config.seed,
        "bright_level": BRIGHT_LEVEL,
        "curve_radius": CURVE_RADIUS,
        "per_n": {},
    }
    profiles: dict[int, tuple[RadialProfile, RadialProfile]] = {}
    point_target = _is_point_target(config)
    if point_target:
        curve = config.inclusions[0].curve
        center = curve.evaluate(np.array([np.mean(curve.z_range)]))[0]
        omegas = [svd.omega for svd in svds]
        for n, image in images.items():
            computed = RadialProfile(
                radii=PROFILE_RADII,
                values=compute_radial_profile(
                    svds, dirs, config.mode, n, PROFILE_RADII, center=center
                ),
            )
            predicted = predict_profile(
                PROFILE_RADII,
                PredictionConfig(
                    omega_1=omegas[0],
                    omega_k=omegas[-1],
                    k_count=config.k_count,
                    n=n,
                    q_count=config.q_count,
                ),
            )
            profiles[n] = (computed, predicted)
    for n, image in images.items():
        entry = {
            "peak": list(image.peak_location()),
            "bright_fraction_near_curve": bright_fraction_near_curve(image, distances),
            "sidelobe_mean": sidelobe_mean(image, distances),
        }
        if n in profiles:
            entry["profile_match_score"] = profile_match_score(*profiles[n])
        metrics["per_n"][str(n)] = entry
    timings["analyze"] = time.perf_counter() - started

    started = time.perf_counter()
    for n, image in images.items():
        stem = map_basename(config.tag, n, config.k_count)
        image_to_csv(image, out_path / f"{stem}.csv")
        image_to_pgm(image, out_path / f"{stem}.pgm")
        manifest.outputs.extend([f"{stem}.csv", f"{stem}.pgm"])
    for n, (computed, predicted) in profiles.items():
        name = f"{config.tag}_profile_n{n}.csv"
        profiles_to_csv(computed, predicted, out_path / name)
        manifest.outputs.append(name)
    metrics_name = f"{config.tag}_metrics.json"
    with open(out_path / metrics_name, "w", encoding="ascii", newline="\n") as handle:
        json.dump(metrics, handle, indent=2, sort_keys=True)
        handle.write("\n")
    manifest.outputs.append(metrics_name)
    timings["export"] = time.perf_counter() - started

    manifest.timings = timings
    manifest.outputs.sort()
    manifest.write(out_path / f"{config.tag}_manifest.json")
    return manifest


def _simulate_clean(config: ExperimentConfig):
    dirs = make_directions(config.p_count, config.q_count)
    omegas = make_frequencies(
        config.k_count, config.lambda_lo, config.lambda_hi, config.spacing
    ).omegas
    matrices = [
        assemble_msr(list(config.inclusions), config.background, dirs, w, config.quad_count)
        for w in omegas
    ]
    return dirs, matrices


def _apply_noise(config: ExperimentConfig, matrices):
    if config.snr_db is None:
        return matrices
    seeds = _frequency_noise_seeds(config.seed, config.k_count)
    return [
        add_awgn(mat, NoiseSpec(snr_db=config.snr_db, seed=seeds[k]))
        for k, mat in enumerate(matrices)
    ]


def load_config_file(path) -> list[ExperimentConfig]:
    """Read a config JSON file; returns every run it defines."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if "runs" in data:
        return [config_from_json(item) for item in data["runs"]]
    return [config_from_json(data)]


def list_presets() -> list[str]:
    root = resources.files("thinscan.presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> list[ExperimentConfig]:
    """Load a shipped preset by name; returns every run it defines."""
    root = resources.files("thinscan.presets")
    candidate = root / f"{name}.json"
    if not candidate.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(list_presets())}"
        )
    data = json.loads(candidate.read_text(encoding="utf-8"))
    if "runs" in data:
        return [config_from_json(item) for item in data["runs"]]
    return [config_from_json(data)]


def run_preset(name: str, out_dir, seed: int | None = None) -> list[RunManifest]:
    """Run every experiment in a preset, optionally overriding the seed."""
    manifests = []
    for config in load_preset(name):
        if seed is not None:
            config = replace(config, seed=seed)
        manifests.append(run_experiment(config, out_dir))
    return manifests
