"""Directional-loudness transforms of ambisonic signals and ACCDOA labels.

A transform matrix is assembled as ``T = Y_out @ diag(g) @ W``: the input
soundfield is decoded onto a t-design grid by a hypercardioid beamformer
``W``, every beam is weighted by a spherical-cap gain, and the result is
re-encoded at the output order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .sph import (
    DIPOLE_TO_XYZ,
    Direction,
    SphericalGrid,
    build_sh_matrix,
    encode_vectors,
    eval_sh,
    first_order_rotation_matrix,
    n_channels,
)


BOUNDARY_TOL = 1e-12


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 20.0)


@dataclass(frozen=True)
class SphericalCap:
    """Cap centred on ``center`` with full opening angle ``width`` (radians).

    Directions inside the cap get ``gain_inside_db``, the rest
    ``gain_outside_db``.
    """

    center: Direction
    width: float
    gain_inside_db: float
    gain_outside_db: float

    def __post_init__(self):
        if not 0 < self.width <= math.pi:
            raise ValueError(f"cap width {self.width} outside (0, pi]")
        if self.gain_inside_db > 0 or self.gain_outside_db > 0:
            raise ValueError("cap gains must be <= 0 dB")


@dataclass(frozen=True)
class DirectionalGains:
    grid: SphericalGrid
    linear_gains: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.linear_gains, dtype=float)
        if g.shape != (self.grid.n_grid,):
            raise ValueError(f"expected {self.grid.n_grid} gains, got shape {g.shape}")
        if np.any(g < 0):
            raise ValueError("directional gains must be non-negative")
        object.__setattr__(self, "linear_gains", g)

    @classmethod
    def unit(cls, grid: SphericalGrid) -> "DirectionalGains":
        return cls(grid, np.ones(grid.n_grid))


def cap_gains(cap: SphericalCap, grid: SphericalGrid) -> DirectionalGains:
    """Evaluate the spherical-cap gain at each grid point.

    The cap boundary itself counts as inside, up to ``BOUNDARY_TOL`` in
    cosine so that round-off does not move grid points across it.
    """
    cosines = grid.vectors @ cap.center.unit_vector
    inside = cosines >= math.cos(cap.width / 2) - BOUNDARY_TOL
    gains = np.where(inside, db_to_linear(cap.gain_inside_db), db_to_linear(cap.gain_outside_db))
    return DirectionalGains(grid, gains)


def build_beamformer(grid: SphericalGrid, order_in: int, normalization: str = "quadrature",
                     strict: bool = True) -> np.ndarray:
    """Hypercardioid beams steered at every grid point, shape (n_grid, (N+1)**2).

    ``normalization="quadrature"`` scales by 4*pi/n_grid so that re-encoding
    the unweighted beams reproduces the input exactly; ``"literal"`` uses
    1/(N+1)**2 instead.
    """
    if grid.quadrature_degree < 2 * order_in:
        msg = (f"grid of degree {grid.quadrature_degree} cannot resolve order {order_in} "
               f"(needs >= {2 * order_in})")
        if strict:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
    if normalization == "quadrature":
        scale = grid.weight
    elif normalization == "literal":
        scale = 1.0 / n_channels(order_in)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return scale * build_sh_matrix(grid, order_in).T


@dataclass(frozen=True)
class DirectionalTransform:
    matrix: np.ndarray = field(repr=False)
    order_in: int
    order_out: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = (n_channels(self.order_out), n_channels(self.order_in))
        if self.matrix.shape != expected:
            raise ValueError(f"matrix shape {self.matrix.shape} does not match orders {expected}")

    @classmethod
    def identity(cls, order: int = 1) -> "DirectionalTransform":
        return cls(np.eye(n_channels(order)), order, order, {"kind": "identity"})


def build_transform(grid: SphericalGrid, gains: DirectionalGains, order_in: int = 1,
                    order_out: int = 1, rotation=None, normalization: str = "quadrature",
                    strict: bool = True) -> DirectionalTransform:
    """Assemble ``Y_out @ diag(gains) @ W``, optionally followed by a rotation.

    A rotation acts on the first-order output and therefore requires
    ``order_out == 1``.
    """
    if gains.grid is not grid and not np.array_equal(gains.grid.vectors, grid.vectors):
        raise ValueError("gains were computed on a different grid")
    if order_in < 0 or order_out < 0:
        raise ValueError("orders must be non-negative")
    w = build_beamformer(grid, order_in, normalization, strict)
    y_out = build_sh_matrix(grid, order_out)
    matrix = (y_out * gains.linear_gains) @ w
    if rotation is not None:
        if order_out != 1:
            raise ValueError("rotation is only supported for first-order output")
        matrix = first_order_rotation_matrix(rotation) @ matrix
    provenance = {
        "grid_degree": grid.quadrature_degree,
        "n_grid": grid.n_grid,
        "gains": gains.linear_gains.tolist(),
        "rotation": None if rotation is None else np.asarray(rotation).tolist(),
        "normalization": normalization,
    }
    return DirectionalTransform(matrix, order_in, order_out, provenance)


def mixing_matrix(transform: DirectionalTransform, lam: float) -> np.ndarray:
    """``lam * I_pad + (1 - lam) * T``; the identity part is zero-padded or
    truncated when the orders differ."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixup weight {lam} outside [0, 1]")
    n_out, n_in = transform.matrix.shape
    return lam * np.eye(n_out, n_in) + (1.0 - lam) * transform.matrix


def apply_matrix(matrix: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Per-sample channel mixing of a (channels, frames) array.

    Accumulates input channels in a fixed order, so every output sample only
    depends on its own column and results are independent of how the clip
    is split into blocks.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] != matrix.shape[1]:
        raise ValueError(f"signal has {samples.shape[0]} channels, transform expects {matrix.shape[1]}")
    out = np.zeros((matrix.shape[0],) + samples.shape[1:])
    for c in range(matrix.shape[1]):
        out += matrix[:, c, None] * samples[c]
    return out


def apply_spatial_mixup(clip, transform: DirectionalTransform, lam: float):
    """Blend a clip with its directionally transformed version.

    ``clip`` is an :class:`~spatial_mixup.dataset_io.AmbisonicClip` in the
    internal N3D convention; a new clip at ``transform.order_out`` is
    returned.
    """
    if clip.order != transform.order_in:
        raise ValueError(f"clip order {clip.order} != transform input order {transform.order_in}")
    if clip.convention != "N3D":
        raise ValueError("spatial mixup operates on N3D clips; convert first")
    out = apply_matrix(mixing_matrix(transform, lam), clip.samples)
    return clip.replace(samples=out, order=transform.order_out)


def transform_labels(labels, transform: DirectionalTransform, lam: float):
    """Apply the directional transform to ACCDOA labels.

    Each event is encoded as a first-order plane wave and pushed through
    the same mixing matrix as the audio. The new activity is the old one
    scaled by the magnitude of the omni gain the signal path applies from
    that direction, capped at 1; the new direction is read from the
    transformed dipole channels.
    """
    if transform.order_in != 1 or transform.order_out != 1:
        raise ValueError("label transform requires a first-order transform")
    m = mixing_matrix(transform, lam)
    frames = {frame: [ev.with_vector(transform_vector(m, ev.vector)) for ev in events]
              for frame, events in labels.frames.items()}
    return labels.replace(frames=frames)


def transform_vector(m: np.ndarray, vector) -> np.ndarray:
    """Map one ACCDOA vector through a 4x4 first-order mixing matrix."""
    vector = np.asarray(vector, dtype=float)
    activity = np.linalg.norm(vector)
    if activity == 0:
        return vector.copy()
    unit = vector / activity
    y = encode_vectors(unit, 1)
    v = m @ y
    gain = v[0] / y[0]
    dipole = v[DIPOLE_TO_XYZ]
    norm = np.linalg.norm(dipole)
    direction = dipole / norm if norm > 1e-12 else unit
    return direction * activity * min(abs(gain), 1.0)


def plane_wave_gain(transform: DirectionalTransform, direction: Direction, lam: float = 0.0) -> float:
    """Omni-channel amplitude ratio output/input for a plane wave."""
    y = eval_sh(direction, transform.order_in)
    return float((mixing_matrix(transform, lam) @ y)[0] / y[0])


def directivity_response(transform: DirectionalTransform, channel: int, probe) -> np.ndarray:
    """Output of ``channel`` for a unit plane wave from ``probe``.

    ``probe`` is a :class:`Direction` or an array of unit vectors (..., 3).
    """
    if not 0 <= channel < n_channels(transform.order_out):
        raise ValueError(f"channel {channel} out of range for order {transform.order_out}")
    if isinstance(probe, Direction):
        y = eval_sh(probe, transform.order_in)
    else:
        y = encode_vectors(probe, transform.order_in)
    return y @ transform.matrix[channel]


def regular_mixup(x, y, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    return lam * x + (1.0 - lam) * y
