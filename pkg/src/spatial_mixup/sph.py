"""Real spherical harmonics, t-design grids and first-order rotations.

Convention: real, orthonormal (N3D) spherical harmonics in ACN channel order,
no Condon-Shortley phase. Azimuth is measured counter-clockwise from +x,
elevation from the horizontal plane.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

MAX_ORDER = 3


@dataclass(frozen=True)
class Direction:
    """A point on the unit sphere, angles in radians."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        if not (-math.pi - 1e-12 <= self.azimuth <= math.pi + 1e-12):
            raise ValueError(f"azimuth {self.azimuth} outside [-pi, pi]")
        if not (-math.pi / 2 - 1e-12 <= self.elevation <= math.pi / 2 + 1e-12):
            raise ValueError(f"elevation {self.elevation} outside [-pi/2, pi/2]")

    @property
    def unit_vector(self) -> np.ndarray:
        return angles_to_vector(self.azimuth, self.elevation)

    @classmethod
    def from_vector(cls, v) -> "Direction":
        az, el = vector_to_angles(v)
        return cls(float(az), float(el))

    @classmethod
    def from_angles(cls, azimuth: float, elevation: float) -> "Direction":
        """Build a direction from arbitrary (possibly out-of-range) angles."""
        return cls.from_vector(angles_to_vector(azimuth, elevation))

    def antipode(self) -> "Direction":
        return Direction.from_vector(-self.unit_vector)


def angles_to_vector(azimuth, elevation) -> np.ndarray:
    """Cartesian unit vector(s), shape (..., 3)."""
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    ce = np.cos(elevation)
    return np.stack([ce * np.cos(azimuth), ce * np.sin(azimuth), np.sin(elevation)], axis=-1)


def vector_to_angles(v):
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=-1)
    if np.any(norm == 0):
        raise ValueError("zero vector has no direction")
    x, y, z = np.moveaxis(v, -1, 0) / norm
    return np.arctan2(y, x), np.arcsin(np.clip(z, -1.0, 1.0))


def n_channels(order: int) -> int:
    return (order + 1) ** 2


def acn_index(n: int, m: int) -> int:
    return n * n + n + m


def _legendre(order: int, x: np.ndarray) -> dict:
    """Associated Legendre functions P_n^m(x), m >= 0, without Condon-Shortley phase."""
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    p = {(0, 0): np.ones_like(x)}
    for m in range(1, order + 1):
        p[m, m] = (2 * m - 1) * s * p[m - 1, m - 1]
    for m in range(order):
        p[m + 1, m] = (2 * m + 1) * x * p[m, m]
    for m in range(order + 1):
        for n in range(m + 2, order + 1):
            p[n, m] = ((2 * n - 1) * x * p[n - 1, m] - (n + m - 1) * p[n - 2, m]) / (n - m)
    return p


def sh_matrix(azimuth, elevation, order: int) -> np.ndarray:
    """Evaluate the real SH basis up to ``order`` at the given angles.

    Parameters
    ----------
    azimuth, elevation : array_like
        Angles in radians, broadcastable to a common shape ``S``.
    order : int
        Maximum SH order.

    Returns
    -------
    numpy.ndarray
        Shape ``S + ((order+1)**2,)``, ACN ordered.
    """
    if order < 0:
        raise ValueError("SH order must be non-negative")
    azimuth, elevation = np.broadcast_arrays(
        np.asarray(azimuth, dtype=float), np.asarray(elevation, dtype=float)
    )
    p = _legendre(order, np.sin(elevation))
    out = np.empty(azimuth.shape + (n_channels(order),))
    for n in range(order + 1):
        for m in range(-n, n + 1):
            am = abs(m)
            norm = math.sqrt(
                (2 * n + 1) / (4 * math.pi) * (2 - (m == 0))
                * math.factorial(n - am) / math.factorial(n + am)
            )
            if m > 0:
                trig = np.cos(am * azimuth)
            elif m < 0:
                trig = np.sin(am * azimuth)
            else:
                trig = 1.0
            out[..., acn_index(n, m)] = norm * p[n, am] * trig
    return out


def eval_sh(direction: Direction, order: int) -> np.ndarray:
    """SH coefficient vector of length (order+1)**2 for a single direction."""
    return sh_matrix(direction.azimuth, direction.elevation, order)


def encode_vectors(vectors, order: int) -> np.ndarray:
    """SH matrix for Cartesian unit vectors, shape (..., (order+1)**2)."""
    az, el = vector_to_angles(vectors)
    return sh_matrix(az, el, order)


@dataclass(frozen=True)
class SphericalGrid:
    """Equal-weight spherical sampling that integrates polynomials up to
    ``quadrature_degree`` exactly."""

    vectors: np.ndarray = field(repr=False)
    quadrature_degree: int

    @property
    def n_grid(self) -> int:
        return len(self.vectors)

    @property
    def directions(self) -> list[Direction]:
        return [Direction.from_vector(v) for v in self.vectors]

    @property
    def azimuth(self) -> np.ndarray:
        return vector_to_angles(self.vectors)[0]

    @property
    def elevation(self) -> np.ndarray:
        return vector_to_angles(self.vectors)[1]

    @property
    def weight(self) -> float:
        return 4 * math.pi / self.n_grid


def build_sh_matrix(grid: SphericalGrid, order: int) -> np.ndarray:
    """SH matrix with one column per grid point, shape ((order+1)**2, n_grid)."""
    return encode_vectors(grid.vectors, order).T


def _octahedral_rotations() -> list[np.ndarray]:
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            r = np.zeros((3, 3))
            r[range(3), perm] = signs
            if np.linalg.det(r) > 0:
                mats.append(r)
    return mats


def _design_24() -> np.ndarray:
    # Orbit of (a, b, c) under the 24 proper rotations of the cube. The orbit
    # integrates every harmonic of degree <= 7 except the two octahedral
    # invariants of degree 4 and 6; those vanish when the squared coordinates
    # are the roots of t^3 - t^2 + t/5 - 1/105.
    roots = np.sort(np.roots([1.0, -1.0, 0.2, -1.0 / 105.0]).real)
    roots = roots / roots.sum()
    generator = np.sqrt(roots)
    return np.array([r @ generator for r in _octahedral_rotations()])


_OCTAHEDRON = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float
)

SUPPORTED_DEGREES = (3, 7)


def tdesign(degree: int) -> SphericalGrid:
    """Spherical t-design of degree 3 (octahedron, 6 points) or 7 (24 points)."""
    if degree == 3:
        return SphericalGrid(_OCTAHEDRON.copy(), 3)
    if degree == 7:
        return SphericalGrid(_design_24(), 7)
    raise ValueError(f"unsupported t-design degree {degree}; supported: {SUPPORTED_DEGREES}")


def quadrature_residual(grid: SphericalGrid, degree: int | None = None) -> float:
    """Largest deviation of the discrete Gram matrix from identity over all
    SH pairs (n, m), (n', m') with n + n' <= degree."""
    t = grid.quadrature_degree if degree is None else degree
    y = build_sh_matrix(grid, t)
    gram = grid.weight * y @ y.T
    orders = np.concatenate([[n] * (2 * n + 1) for n in range(t + 1)])
    mask = orders[:, None] + orders[None, :] <= t
    return float(np.max(np.abs(gram - np.eye(len(gram)))[mask]))


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """Right-handed rotation matrix (Rodrigues)."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * kx @ kx


def check_rotation(rot, atol: float = 1e-12) -> np.ndarray:
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3):
        raise ValueError("rotation must be 3x3")
    if not np.allclose(rot.T @ rot, np.eye(3), atol=atol) or abs(np.linalg.det(rot) - 1) > atol:
        raise ValueError("matrix is not a proper rotation")
    return rot


# ACN dipoles are (Y, Z, X); this permutation maps them to (x, y, z).
DIPOLE_TO_XYZ = [3, 1, 2]


def first_order_rotation_matrix(rot) -> np.ndarray:
    """4x4 matrix acting on ACN/N3D first-order coefficients."""
    rot = check_rotation(rot)
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[np.ix_(DIPOLE_TO_XYZ, DIPOLE_TO_XYZ)] = rot
    return m


def rotate_first_order(coeffs, rot) -> np.ndarray:
    """Rotate first-order coefficients so a plane wave from d maps to R @ d.

    ``coeffs`` may carry trailing sample axes, shape (4, ...).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != 4:
        raise ValueError("rotate_first_order needs exactly first-order (4-channel) input")
    m = first_order_rotation_matrix(rot)
    return np.tensordot(m, coeffs, axes=1)
