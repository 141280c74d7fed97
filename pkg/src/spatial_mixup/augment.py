"""Random spherical-cap sampling and dataset augmentation.

Every clip variant draws from its own random stream, derived from the run
seed and a string clip identifier: the SHA-256 digest of the identifier is
split into four little-endian uint32 words which, appended to the seed,
form the entropy of a :class:`numpy.random.SeedSequence` feeding PCG64.
Results therefore do not depend on clip order or on parallel scheduling.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .dataset_io import read_audio, read_labels, write_audio, write_labels
from .sph import Direction, tdesign
from .transform import (
    SphericalCap,
    apply_spatial_mixup,
    build_transform,
    cap_gains,
    transform_labels,
)

log = logging.getLogger(__name__)

PI = math.pi


@dataclass(frozen=True)
class CapDistribution:
    """Parameter ranges for random spherical caps; angles in radians, gains in dB.

    ``g1_range_db`` is sampled as a truncated exponential with its mode at
    the upper end, ``g2_range_db`` uniformly.
    """

    regime: str
    azimuth_range: tuple = (0.0, PI)
    elevation_range: tuple = (-PI, PI)
    width_range: tuple = (PI / 4, PI)
    g1_range_db: tuple = (-3.0, 0.0)
    g2_range_db: tuple = (-6.0, -3.0)

    def __post_init__(self):
        for name in ("azimuth_range", "elevation_range", "width_range", "g1_range_db", "g2_range_db"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: empty range ({lo}, {hi})")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.g1_range_db[1] > 0 or self.g2_range_db[1] > 0:
            raise ValueError("gain ranges must be non-positive")
        if self.width_range[0] <= 0 or self.width_range[1] > PI:
            raise ValueError("cap widths must lie in (0, pi]")

    @classmethod
    def soft(cls, **overrides) -> "CapDistribution":
        return cls("soft", **overrides)

    @classmethod
    def hard(cls, **overrides) -> "CapDistribution":
        return cls("hard", width_range=(PI / 4, PI / 2), g1_range_db=(-6.0, 0.0),
                   g2_range_db=(-20.0, -6.0), **overrides)

    @classmethod
    def for_regime(cls, regime: str, **overrides) -> "CapDistribution":
        if regime == "soft":
            return cls.soft(**overrides)
        if regime == "hard":
            return cls.hard(**overrides)
        raise ValueError(f"unknown regime {regime!r} (expected 'soft' or 'hard')")


def sample_cap(dist: CapDistribution, rng: np.random.Generator) -> tuple[SphericalCap, dict]:
    """Draw one cap. Returns the cap and the raw sampled values."""
    azimuth = rng.uniform(*dist.azimuth_range)
    elevation = rng.uniform(*dist.elevation_range)
    width = rng.uniform(*dist.width_range)
    lo, hi = dist.g1_range_db
    g1 = hi - (hi - lo) * min(rng.standard_exponential(), 1.0)
    g2 = rng.uniform(*dist.g2_range_db)
    cap = SphericalCap(Direction.from_angles(azimuth, elevation), width, g1, g2)
    raw = {"azimuth": azimuth, "elevation": elevation, "width": width,
           "gain_inside_db": g1, "gain_outside_db": g2}
    return cap, raw


@dataclass(frozen=True)
class MixupPolicy:
    lam_mode: str = "fixed"
    lam_value: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    transform_labels: bool = False
    output_order: int = 1
    probability: float = 1.0

    def __post_init__(self):
        if self.lam_mode not in ("fixed", "beta"):
            raise ValueError(f"unknown lambda mode {self.lam_mode!r}")
        if not 0 <= self.lam_value <= 1:
            raise ValueError("lambda must lie in [0, 1]")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("beta parameters must be positive")
        if not 0 <= self.probability <= 1:
            raise ValueError("augmentation probability must lie in [0, 1]")
        if self.output_order < 0:
            raise ValueError("output order must be non-negative")

    def sample_lambda(self, rng: np.random.Generator) -> float:
        if self.lam_mode == "beta":
            return float(rng.beta(self.alpha, self.beta))
        return self.lam_value


def clip_stream(seed: int, clip_id: str) -> np.random.Generator:
    digest = hashlib.sha256(clip_id.encode("utf-8")).digest()
    words = np.frombuffer(digest[:16], dtype="<u4").tolist()
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), *words])))


def augment_clip(clip, labels, dist: CapDistribution, policy: MixupPolicy,
                 rng: np.random.Generator, grid_degree: int = 7,
                 normalization: str = "quadrature"):
    """Augment one N3D clip (and optionally its labels).

    Returns ``(clip, labels, record)`` where ``record`` lists every random
    choice needed to rebuild the output.
    """
    applied = bool(rng.uniform() < policy.probability)
    cap, raw = sample_cap(dist, rng)
    lam = policy.sample_lambda(rng)
    if not applied:
        lam = 1.0
    if policy.transform_labels and (clip.order != 1 or policy.output_order != 1):
        raise ValueError("label transform needs first-order input and output")
    grid = tdesign(grid_degree)
    transform = build_transform(grid, cap_gains(cap, grid), clip.order, policy.output_order,
                                normalization=normalization)
    out_clip = apply_spatial_mixup(clip, transform, lam)
    out_labels = labels
    if labels is not None and policy.transform_labels:
        out_labels = transform_labels(labels, transform, lam)
    record = {
        "applied": applied,
        "regime": dist.regime,
        "sampled": raw,
        "cap": {"azimuth": cap.center.azimuth, "elevation": cap.center.elevation,
                "width": cap.width, "gain_inside_db": cap.gain_inside_db,
                "gain_outside_db": cap.gain_outside_db},
        "lambda": lam,
        "grid_degree": grid_degree,
        "normalization": normalization,
        "order_in": clip.order,
        "order_out": policy.output_order,
        "labels_transformed": bool(labels is not None and policy.transform_labels),
    }
    return out_clip, out_labels, record


@dataclass(frozen=True)
class AugmentConfig:
    """Settings for a dataset augmentation run.

    YAML keys mirror the field names; ``policy`` is a nested mapping of
    :class:`MixupPolicy` fields. Range overrides are given in degrees.
    """

    regime: str = "soft"
    grid_degree: int = 7
    seed: int = 0
    variants_per_clip: int = 1
    normalization: str = "quadrature"
    activity_column: bool = False
    azimuth_range_deg: tuple | None = None
    elevation_range_deg: tuple | None = None
    policy: MixupPolicy = field(default_factory=MixupPolicy)

    def distribution(self) -> CapDistribution:
        overrides = {}
        if self.azimuth_range_deg is not None:
            overrides["azimuth_range"] = tuple(math.radians(v) for v in self.azimuth_range_deg)
        if self.elevation_range_deg is not None:
            overrides["elevation_range"] = tuple(math.radians(v) for v in self.elevation_range_deg)
        return CapDistribution.for_regime(self.regime, **overrides)

    def with_overrides(self, **changes) -> "AugmentConfig":
        policy_fields = {f.name for f in dataclasses.fields(MixupPolicy)}
        policy_changes = {k: v for k, v in changes.items() if k in policy_fields and v is not None}
        top = {k: v for k, v in changes.items() if k not in policy_fields and v is not None}
        return dataclasses.replace(self, policy=dataclasses.replace(self.policy, **policy_changes), **top)


def load_config(path) -> AugmentConfig:
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping")
    known = {f.name for f in dataclasses.fields(AugmentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    policy = data.pop("policy", None) or {}
    policy_known = {f.name for f in dataclasses.fields(MixupPolicy)}
    if set(policy) - policy_known:
        raise ValueError(f"{path}: unknown policy keys {sorted(set(policy) - policy_known)}")
    for key in ("azimuth_range_deg", "elevation_range_deg"):
        if data.get(key) is not None:
            data[key] = tuple(data[key])
    return AugmentConfig(policy=MixupPolicy(**policy), **data)


@dataclass(frozen=True)
class ManifestEntry:
    clip_id: str
    audio: Path
    labels: Path | None


def discover_entries(source) -> list[ManifestEntry]:
    """List clips from a directory of WAV+CSV pairs or from a manifest file.

    A manifest is a CSV with ``audio,labels`` columns, paths relative to
    the manifest; ``labels`` may be empty.
    """
    source = Path(source)
    entries = []
    if source.is_dir():
        for wav in sorted(source.glob("*.wav")):
            entries.append(ManifestEntry(wav.stem, wav, wav.with_suffix(".csv")))
        return entries
    with open(source, newline="") as f:
        for row in csv.DictReader(f):
            audio = source.parent / row["audio"]
            labels = row.get("labels") or None
            entries.append(ManifestEntry(audio.stem, audio, source.parent / labels if labels else None))
    return entries


def variant_name(clip_id: str, k: int) -> str:
    return f"{clip_id}_aug{k:03d}"


def _process_entry(entry: ManifestEntry, out_dir: Path, config: AugmentConfig) -> dict:
    try:
        clip = read_audio(entry.audio)
        labels = None
        if entry.labels is not None:
            if not entry.labels.exists():
                raise FileNotFoundError(f"missing label file {entry.labels}")
            labels = read_labels(entry.labels)
        dist = config.distribution()
        records = []
        for k in range(config.variants_per_clip):
            name = variant_name(entry.clip_id, k)
            rng = clip_stream(config.seed, name)
            out_clip, out_labels, record = augment_clip(
                clip, labels, dist, config.policy, rng, config.grid_degree, config.normalization)
            write_audio(out_clip, out_dir / f"{name}.wav")
            if out_labels is not None:
                write_labels(out_labels, out_dir / f"{name}.csv", config.activity_column)
            records.append({"clip": entry.clip_id, "variant": k, "output": name,
                            "seed": config.seed, **record})
        return {"clip": entry.clip_id, "records": records, "error": None}
    except Exception as exc:  # one bad clip must not abort the batch
        log.warning("clip %s failed: %s", entry.clip_id, exc)
        return {"clip": entry.clip_id, "records": [], "error": f"{type(exc).__name__}: {exc}"}


def augment_dataset(entries, out_dir, config: AugmentConfig, jobs: int = 1) -> dict:
    """Augment every entry and write outputs plus ``provenance.jsonl``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = list(entries)
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_process_entry, entries, [out_dir] * len(entries),
                                    [config] * len(entries)))
    else:
        results = [_process_entry(e, out_dir, config) for e in entries]
    results.sort(key=lambda r: r["clip"])
    with open(out_dir / "provenance.jsonl", "w") as f:
        for r in results:
            for rec in r["records"]:
                f.write(json.dumps(rec, sort_keys=True) + "\n")
    failures = [{"clip": r["clip"], "error": r["error"]} for r in results if r["error"]]
    return {
        "clips": len(entries),
        "succeeded": len(entries) - len(failures),
        "variants_written": sum(len(r["records"]) for r in results),
        "failures": failures,
    }
