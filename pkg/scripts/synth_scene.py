"""Write a small synthetic FOA dataset (plane-wave sources + labels) and
augment it, printing how each source's level changed.

    python scripts/synth_scene.py /tmp/scene --regime hard --variants 4
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from spatial_mixup.augment import AugmentConfig, MixupPolicy, augment_dataset, discover_entries
from spatial_mixup.dataset_io import AccdoaEvent, AccdoaFrameLabels, AmbisonicClip, write_audio, write_labels
from spatial_mixup.sph import Direction, eval_sh

SR = 24000


def make_clip(path: Path, rng, n_sources=2, seconds=2.0):
    n = int(SR * seconds)
    x = np.zeros((4, n))
    events = []
    for track in range(n_sources):
        d = Direction(rng.uniform(-math.pi, math.pi), rng.uniform(-0.6, 0.6))
        x += np.outer(eval_sh(d, 1), 0.05 * rng.standard_normal(n))
        events.append(AccdoaEvent(int(rng.integers(12)), track, tuple(d.unit_vector)))
    write_audio(AmbisonicClip(x, SR, 1, subtype="FLOAT"), path.with_suffix(".wav"))
    frames = {f: list(events) for f in range(int(seconds * 10))}
    write_labels(AccdoaFrameLabels(frames), path.with_suffix(".csv"))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("root", type=Path)
    ap.add_argument("--clips", type=int, default=3)
    ap.add_argument("--variants", type=int, default=2)
    ap.add_argument("--regime", default="soft")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    src, out = args.root / "src", args.root / "aug"
    src.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for k in range(args.clips):
        make_clip(src / f"synth_{k:03d}", rng)
    cfg = AugmentConfig(regime=args.regime, seed=args.seed, variants_per_clip=args.variants,
                        activity_column=True, policy=MixupPolicy(transform_labels=True))
    report = augment_dataset(discover_entries(src), out, cfg)
    print(json.dumps(report))
    for path in sorted(out.glob("*.csv")):
        rows = [line.split(",") for line in path.read_text().splitlines() if not line.startswith("#")]
        acts = sorted({(r[2], r[5]) for r in rows})
        print(path.stem, " ".join(f"track{t}:{a}" for t, a in acts))


if __name__ == "__main__":
    main()
