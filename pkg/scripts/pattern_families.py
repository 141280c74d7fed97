"""Horizontal omni-channel patterns for random soft and hard caps.

    python scripts/pattern_families.py --samples 500 --seed 0 [--plot out.png]
"""

import argparse

import numpy as np

from spatial_mixup import augment as aug
from spatial_mixup.cli import horizontal_patterns
from spatial_mixup.sph import tdesign
from spatial_mixup.transform import build_transform, cap_gains


def patterns(regime, samples, seed, grid_degree):
    grid = tdesign(grid_degree)
    dist = aug.CapDistribution.for_regime(regime)
    transforms = []
    for k in range(samples):
        cap, _ = aug.sample_cap(dist, aug.clip_stream(seed, f"pattern-{k}"))
        transforms.append(build_transform(grid, cap_gains(cap, grid)))
    return horizontal_patterns(transforms, 0.0, 0, 360)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid-degree", type=int, default=7)
    ap.add_argument("--plot")
    args = ap.parse_args()

    result = {}
    for regime in ("soft", "hard"):
        az, resp = patterns(regime, args.samples, args.seed, args.grid_degree)
        result[regime] = resp
        spread = np.ptp(resp, axis=1)
        print(f"{regime}: min {resp.min():+.4f} max {resp.max():+.4f} "
              f"negative patterns {int((resp.min(axis=0) < 0).sum())} "
              f"spread {spread.min():.4f}..{spread.max():.4f}")
    narrower = np.ptp(result["soft"], axis=1) < np.ptp(result["hard"], axis=1)
    print(f"soft spread < hard spread at {narrower.sum()}/{len(narrower)} angles")

    if args.plot:
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 2, subplot_kw={"projection": "polar"}, figsize=(9, 4.5))
        for ax, regime in zip(axes, ("hard", "soft")):
            ax.plot(az, result[regime], color="k", alpha=0.02)
            ax.set_title(regime)
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
