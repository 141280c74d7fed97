"""Ambisonic WAV files and DCASE-style ACCDOA label CSVs."""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
import soundfile as sf

from .sph import angles_to_vector, vector_to_angles

N_CLASSES = 12
ACTIVITY_HEADER = "# frame,class,track,azimuth,elevation,activity (activity column is an extension)"


def sn3d_to_n3d_gains(order: int) -> np.ndarray:
    return np.concatenate([[math.sqrt(2 * n + 1)] * (2 * n + 1) for n in range(order + 1)])


def order_from_channels(n_ch: int) -> int:
    order = math.isqrt(n_ch) - 1
    if (order + 1) ** 2 != n_ch:
        raise ValueError(f"channel count {n_ch} is not (N+1)^2")
    return order


@dataclass(frozen=True)
class AmbisonicClip:
    """Multichannel ambisonic signal, shape (channels, frames), ACN ordered."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int
    order: int
    convention: str = "N3D"
    subtype: str = "FLOAT"

    def __post_init__(self):
        if self.convention not in ("N3D", "SN3D"):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.samples.ndim != 2 or self.samples.shape[0] != (self.order + 1) ** 2:
            raise ValueError(f"samples of shape {self.samples.shape} do not match order {self.order}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("non-finite sample values")

    @property
    def n_frames(self) -> int:
        return self.samples.shape[1]

    def replace(self, **changes) -> "AmbisonicClip":
        return dataclasses.replace(self, **changes)

    def to_n3d(self) -> "AmbisonicClip":
        if self.convention == "N3D":
            return self
        return self.replace(samples=self.samples * sn3d_to_n3d_gains(self.order)[:, None],
                            convention="N3D")

    def to_sn3d(self) -> "AmbisonicClip":
        if self.convention == "SN3D":
            return self
        return self.replace(samples=self.samples / sn3d_to_n3d_gains(self.order)[:, None],
                            convention="SN3D")


def read_audio(path) -> AmbisonicClip:
    """Read an SN3D/ACN WAV file into an N3D clip."""
    info = sf.info(str(path))
    if info.format != "WAV":
        raise ValueError(f"{path}: not a RIFF/WAVE file")
    if info.subtype not in ("PCM_16", "PCM_24", "FLOAT"):
        raise ValueError(f"{path}: unsupported encoding {info.subtype}")
    order = order_from_channels(info.channels)
    data, sr = sf.read(str(path), dtype="float64", always_2d=True)
    clip = AmbisonicClip(data.T.copy(), sr, order, "SN3D", info.subtype)
    return clip.to_n3d()


def write_audio(clip: AmbisonicClip, path) -> None:
    """Write a clip as an SN3D/ACN WAV file at the clip's source precision."""
    data = clip.to_sn3d().samples.T
    if clip.subtype == "FLOAT":
        data = data.astype(np.float32)
    sf.write(str(path), data, clip.sample_rate, subtype=clip.subtype, format="WAV")


@dataclass(frozen=True)
class AccdoaEvent:
    class_id: int
    track_id: int
    direction: tuple  # unit vector (x, y, z)
    activity: float = 1.0

    @property
    def vector(self) -> np.ndarray:
        return self.activity * np.asarray(self.direction)

    def with_vector(self, vector) -> "AccdoaEvent":
        vector = np.asarray(vector, dtype=float)
        activity = float(np.linalg.norm(vector))
        direction = self.direction if activity == 0 else tuple(float(v) for v in vector / activity)
        return dataclasses.replace(self, direction=direction, activity=activity)

    def angles_deg(self) -> tuple[float, float]:
        az, el = vector_to_angles(np.asarray(self.direction))
        return math.degrees(az), math.degrees(el)


@dataclass(frozen=True)
class AccdoaFrameLabels:
    """Per-frame ACCDOA events keyed by frame index."""

    frames: dict
    n_classes: int = N_CLASSES

    def __post_init__(self):
        for frame, events in self.frames.items():
            for ev in events:
                if not 0 <= ev.class_id < self.n_classes:
                    raise ValueError(f"frame {frame}: class {ev.class_id} out of range")
                if ev.activity > 1 + 1e-6 or ev.activity < 0:
                    raise ValueError(f"frame {frame}: activity {ev.activity} outside [0, 1]")

    def replace(self, **changes) -> "AccdoaFrameLabels":
        return dataclasses.replace(self, **changes)

    def events(self):
        for frame in sorted(self.frames):
            for ev in self.frames[frame]:
                yield frame, ev

    def __len__(self):
        return sum(len(v) for v in self.frames.values())


def read_labels(path, n_classes: int = N_CLASSES) -> AccdoaFrameLabels:
    """Parse ``frame,class,track,azimuth,elevation[,activity]`` rows (degrees)."""
    frames: dict = {}
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                if len(row) not in (5, 6):
                    raise ValueError(f"expected 5 or 6 fields, got {len(row)}")
                frame, cls, track = (int(float(v)) for v in row[:3])
                az, el = math.radians(float(row[3])), math.radians(float(row[4]))
                activity = float(row[5]) if len(row) == 6 else 1.0
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            direction = tuple(float(v) for v in angles_to_vector(az, el))
            frames.setdefault(frame, []).append(AccdoaEvent(cls, track, direction, activity))
    return AccdoaFrameLabels(frames, n_classes)


def write_labels(labels: AccdoaFrameLabels, path, activity_column: bool = False) -> None:
    """Write labels with integer-rounded angles.

    Plain DCASE output cannot carry attenuated activity; with
    ``activity_column`` a sixth column holds it.
    """
    with open(path, "w", newline="") as f:
        if activity_column:
            f.write(ACTIVITY_HEADER + "\n")
        writer = csv.writer(f, lineterminator="\n")
        for frame, ev in labels.events():
            az, el = ev.angles_deg()
            row = [frame, ev.class_id, ev.track_id, int(round(az)), int(round(el))]
            if activity_column:
                row.append(f"{ev.activity:.6f}")
            writer.writerow(row)
