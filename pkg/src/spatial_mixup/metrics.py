"""Aggregated SELD error and angular distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sph import Direction


@dataclass(frozen=True)
class SeldComponents:
    """Detection and localization metrics; ``localization_error`` in radians."""

    error_rate: float
    f_score: float
    localization_error: float
    localization_recall: float

    def __post_init__(self):
        if self.error_rate < 0:
            raise ValueError("error rate must be >= 0")
        if not 0 <= self.f_score <= 1:
            raise ValueError("F-score must lie in [0, 1]")
        if not 0 <= self.localization_error <= math.pi:
            raise ValueError("localization error must lie in [0, pi] radians")
        if not 0 <= self.localization_recall <= 1:
            raise ValueError("localization recall must lie in [0, 1]")

    @classmethod
    def from_reported(cls, error_rate, f_score, localization_error_deg, localization_recall):
        """Build from table-style values: LE in degrees, F and LR either as
        fractions or as percentages (any value above 1 is read as a percentage)."""
        def frac(v):
            return v / 100.0 if v > 1 else v
        return cls(error_rate, frac(f_score), math.radians(localization_error_deg),
                   frac(localization_recall))


def seld_error(c: SeldComponents) -> float:
    return (c.error_rate + (1 - c.f_score) + c.localization_error / math.pi
            + (1 - c.localization_recall)) / 4


def angular_distance(a: Direction, b: Direction) -> float:
    return float(np.arccos(np.clip(a.unit_vector @ b.unit_vector, -1.0, 1.0)))
