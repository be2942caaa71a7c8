"""Command-line entry point.

Subcommands: run (full pipeline), simulate (write MSR matrices), image
(maps from previously written matrices), predict (closed-form profiles),
compare (computed vs predicted profile for a point-like target), and
bessel-check (special-function identity suite). The THINSCAN_OUT
environment variable overrides --out-dir. Exit codes: 0 on success, 2 for
an invalid configuration, 3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .checks import run_bessel_checks
from .errors import ConfigError
from .forward_model import msr_from_csv, msr_to_csv
from .imaging import (
    compute_images,
    compute_radial_profile,
    image_to_csv,
    image_to_pgm,
    map_basename,
    truncated_svd,
)
from .pipeline import (
    PROFILE_RADII,
    ExperimentConfig,
    load_config_file,
    load_preset,
    run_experiment,
    simulate_matrices,
    validate_config,
)
from .theory import (
    PredictionConfig,
    RadialProfile,
    predict_profile,
    profile_match_score,
    profiles_to_csv,
)
from .forward_model import make_directions, make_frequencies
from .geometry import arc_length


def _add_selection(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="experiment config JSON file")
    parser.add_argument("--preset", help="name of a shipped preset")
    parser.add_argument("--out-dir", type=Path, default=Path("out"))
    parser.add_argument("--seed", type=int, help="override the configured seed")


def _resolve_out_dir(args) -> Path:
    env = os.environ.get("THINSCAN_OUT")
    out = Path(env) if env else args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_runs(args) -> list[ExperimentConfig]:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("choose exactly one of --config or --preset")
    configs = load_config_file(args.config) if args.config else load_preset(args.preset)
    if args.seed is not None:
        configs = [replace(c, seed=args.seed) for c in configs]
    for config in configs:
        violations = validate_config(config)
        if violations:
            raise ConfigError(f"{config.tag}: " + "; ".join(violations))
    return configs


def _cmd_run(args) -> int:
    out = _resolve_out_dir(args)
    for config in _load_runs(args):
        manifest = run_experiment(config, out)
        print(f"{config.tag}: {len(manifest.outputs)} files -> {out}")
    return 0


def _cmd_simulate(args) -> int:
    out = _resolve_out_dir(args)
    for config in _load_runs(args):
        _, matrices = simulate_matrices(config)
        for k, matrix in enumerate(matrices):
            name = f"{config.tag}_msr_k{k:02d}.csv"
            msr_to_csv(matrix, out / name)
        print(f"{config.tag}: wrote {len(matrices)} MSR matrices -> {out}")
    return 0


def _cmd_image(args) -> int:
    out = _resolve_out_dir(args)
    in_dir = args.in_dir or out
    for config in _load_runs(args):
        dirs = make_directions(config.p_count, config.q_count)
        matrices = []
        for k in range(config.k_count):
            path = Path(in_dir) / f"{config.tag}_msr_k{k:02d}.csv"
            if not path.is_file():
                raise FileNotFoundError(f"missing MSR file {path}; run simulate first")
            matrices.append(msr_from_csv(path))
        svds = [truncated_svd(m, config.tau_rel) for m in matrices]
        images = compute_images(svds, dirs, config.mode, config.n_weights, config.grid)
        for n, image in images.items():
            stem = map_basename(config.tag, n, config.k_count)
            image_to_csv(image, out / f"{stem}.csv")
            image_to_pgm(image, out / f"{stem}.pgm")
        print(f"{config.tag}: wrote {len(images)} maps -> {out}")
    return 0


def _prediction_for(config: ExperimentConfig, n: int) -> PredictionConfig:
    omegas = make_frequencies(
        config.k_count, config.lambda_lo, config.lambda_hi, config.spacing
    ).omegas
    return PredictionConfig(
        omega_1=float(omegas[0]),
        omega_k=float(omegas[-1]),
        k_count=config.k_count,
        n=int(n),
        q_count=config.q_count,
    )


def _cmd_predict(args) -> int:
    out = _resolve_out_dir(args)
    for config in _load_runs(args):
        if config.k_count < 2:
            raise ConfigError(f"{config.tag}: prediction needs at least two frequencies")
        for n in config.n_weights:
            profile = predict_profile(PROFILE_RADII, _prediction_for(config, n))
            name = f"{config.tag}_predicted_n{n}.csv"
            lines = ["r,value"] + [
                f"{r:.17g},{v:.17g}" for r, v in zip(profile.radii, profile.values)
            ]
            with open(out / name, "w", encoding="ascii", newline="\n") as handle:
                handle.write("\n".join(lines) + "\n")
        print(f"{config.tag}: wrote predicted profiles -> {out}")
    return 0


def _cmd_compare(args) -> int:
    out = _resolve_out_dir(args)
    for config in _load_runs(args):
        if len(config.inclusions) != 1 or arc_length(config.inclusions[0].curve) >= 0.02:
            raise ConfigError(
                f"{config.tag}: compare needs a single point-like inclusion "
                "(arc length below 0.02)"
            )
        if config.k_count < 2:
            raise ConfigError(f"{config.tag}: compare needs at least two frequencies")
        dirs, matrices = simulate_matrices(config)
        svds = [truncated_svd(m, config.tau_rel) for m in matrices]
        curve = config.inclusions[0].curve
        center = curve.evaluate(np.array([np.mean(curve.z_range)]))[0]
        for n in config.n_weights:
            computed = RadialProfile(
                radii=PROFILE_RADII,
                values=compute_radial_profile(
                    svds, dirs, config.mode, n, PROFILE_RADII, center=center
                ),
            )
            predicted = predict_profile(PROFILE_RADII, _prediction_for(config, n))
            name = f"{config.tag}_profile_n{n}.csv"
            profiles_to_csv(computed, predicted, out / name)
            score = profile_match_score(computed, predicted)
            print(f"{config.tag} n={n}: profile match score {score:.4f}")
    return 0


def _cmd_bessel_check(args) -> int:
    results = run_bessel_checks()
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thinscan",
        description="Multi-frequency subspace-migration imaging of thin inclusions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, needs_selection in [
        ("run", _cmd_run, True),
        ("simulate", _cmd_simulate, True),
        ("image", _cmd_image, True),
        ("predict", _cmd_predict, True),
        ("compare", _cmd_compare, True),
        ("bessel-check", _cmd_bessel_check, False),
    ]:
        cmd = sub.add_parser(name)
        if needs_selection:
            _add_selection(cmd)
        if name == "image":
            cmd.add_argument("--in-dir", type=Path, help="directory with MSR CSV files")
        cmd.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical or I/O failure
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
