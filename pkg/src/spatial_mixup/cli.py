"""Command line entry point: ``spatial-mixup {augment,pattern,grid,seld-error}``.

Angles are given in degrees on the command line. The last stdout line of
every command is a single JSON object. Exit codes: 0 success, 1 partial
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import augment as aug
from .metrics import SeldComponents, seld_error
from .sph import Direction, angles_to_vector, quadrature_residual, tdesign
from .transform import (
    DirectionalTransform,
    SphericalCap,
    build_transform,
    cap_gains,
    directivity_response,
    mixing_matrix,
)

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_augment(args) -> int:
    config = aug.load_config(args.config) if args.config else aug.AugmentConfig()
    lam_mode = None
    if args.beta is not None:
        lam_mode = "beta"
    elif args.lam is not None:
        lam_mode = "fixed"
    config = config.with_overrides(
        regime=args.regime, grid_degree=args.grid_degree, seed=args.seed,
        variants_per_clip=args.variants, activity_column=args.activity_column or None,
        lam_mode=lam_mode, lam_value=args.lam,
        alpha=args.beta[0] if args.beta else None, beta=args.beta[1] if args.beta else None,
        transform_labels=args.transform_labels or None, output_order=args.output_order,
        probability=args.probability,
    )
    config.distribution()
    tdesign(config.grid_degree)
    entries = aug.discover_entries(args.input)
    report = aug.augment_dataset(entries, args.output, config, jobs=args.jobs)
    for failure in report["failures"]:
        print(f"FAILED {failure['clip']}: {failure['error']}")
    print(f"{report['succeeded']}/{report['clips']} clips, {report['variants_written']} variants "
          f"written to {args.output}")
    _emit(report)
    return EXIT_PARTIAL if report["failures"] else EXIT_OK


def _pattern_transforms(args):
    grid = tdesign(args.grid_degree)
    if args.identity:
        return [DirectionalTransform.identity(args.order)], [{"kind": "identity"}]
    if args.cap is not None:
        az, el, width, g1, g2 = args.cap
        cap = SphericalCap(Direction.from_angles(math.radians(az), math.radians(el)),
                           math.radians(width), g1, g2)
        return [build_transform(grid, cap_gains(cap, grid), args.order, args.order)], [
            {"kind": "cap", "cap": list(args.cap)}]
    dist = aug.CapDistribution.for_regime(args.regime)
    transforms, caps = [], []
    for k in range(args.samples):
        cap, raw = aug.sample_cap(dist, aug.clip_stream(args.seed, f"pattern-{k}"))
        transforms.append(build_transform(grid, cap_gains(cap, grid), args.order, args.order))
        caps.append(raw)
    return transforms, caps


def horizontal_patterns(transforms, lam: float, channel: int, points: int):
    """Responses on the horizontal plane, shape (points, len(transforms))."""
    azimuth = np.linspace(-math.pi, math.pi, points, endpoint=False)
    probe = angles_to_vector(azimuth, np.zeros_like(azimuth))
    cols = []
    for t in transforms:
        mixed = DirectionalTransform(mixing_matrix(t, lam), t.order_in, t.order_out)
        cols.append(directivity_response(mixed, channel, probe))
    return azimuth, np.stack(cols, axis=1)


def cmd_pattern(args) -> int:
    transforms, caps = _pattern_transforms(args)
    azimuth, resp = horizontal_patterns(transforms, args.lam or 0.0, args.channel, args.points)
    with open(args.output, "w") as f:
        f.write("azimuth_deg," + ",".join(f"p{k:03d}" for k in range(resp.shape[1])) + "\n")
        for a, row in zip(np.degrees(azimuth), resp):
            f.write(f"{a:.6f}," + ",".join(f"{v:.9f}" for v in row) + "\n")
    print(f"wrote {resp.shape[1]} pattern(s) x {resp.shape[0]} angles to {args.output}")
    _emit({"patterns": resp.shape[1], "points": resp.shape[0], "min": float(resp.min()),
           "max": float(resp.max()), "negative_patterns": int((resp.min(axis=0) < 0).sum()),
           "output": str(args.output)})
    return EXIT_OK


def cmd_grid(args) -> int:
    grid = tdesign(args.degree)
    print("azimuth_deg,elevation_deg,x,y,z")
    for v, az, el in zip(grid.vectors, grid.azimuth, grid.elevation):
        print(f"{math.degrees(az):.9f},{math.degrees(el):.9f},{v[0]:.12f},{v[1]:.12f},{v[2]:.12f}")
    residual = quadrature_residual(grid)
    _emit({"degree": args.degree, "n_grid": grid.n_grid, "residual": residual})
    return EXIT_OK


def cmd_seld_error(args) -> int:
    le_deg = math.degrees(args.le) if args.radians else args.le
    value = seld_error(SeldComponents.from_reported(args.er, args.f, le_deg, args.lr))
    print(f"{value:.4f}")
    _emit({"seld_error": value})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spatial-mixup", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment a directory or manifest of WAV+CSV pairs")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--config")
    p.add_argument("--regime", choices=["soft", "hard"])
    p.add_argument("--grid-degree", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--variants", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta", nargs=2, type=float, metavar=("ALPHA", "BETA"))
    p.add_argument("--transform-labels", action="store_true")
    p.add_argument("--activity-column", action="store_true")
    p.add_argument("--output-order", type=int)
    p.add_argument("--probability", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("pattern", help="dump horizontal cross-sections of the omni response")
    p.add_argument("--out", dest="output", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--identity", action="store_true")
    mode.add_argument("--cap", nargs=5, type=float,
                      metavar=("AZ", "EL", "WIDTH", "G1_DB", "G2_DB"))
    p.add_argument("--regime", choices=["soft", "hard"], default="soft")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-degree", type=int, default=7)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--points", type=int, default=360)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("grid", help="print t-design points and quadrature residual")
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("seld-error", help="aggregate ER, F, LE, LR into the SELD error")
    p.add_argument("er", type=float)
    p.add_argument("f", type=float, help="F-score, fraction or percent")
    p.add_argument("le", type=float, help="localization error in degrees")
    p.add_argument("lr", type=float, help="localization recall, fraction or percent")
    p.add_argument("--radians", action="store_true", help="LE is given in radians")
    p.set_defaults(func=cmd_seld_error)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"error": str(exc)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
