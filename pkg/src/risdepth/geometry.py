"""
Coordinate conventions and uniform planar array (UPA) geometry.

The RIS lies in the x-z plane with its reference element at the origin and
the scene in front of it (y > 0). Azimuth is measured from +x inside the
x-y plane, zenith from +z, so a unit direction reads

    u = (cos(az) sin(ze), sin(az) sin(ze), cos(ze)).

Elements are indexed row-major with x fast and z slow,
n = i_z * n_h + i_x, which is the ordering produced by kron(v_z, v_x).
"""
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDistance

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Direction:
    """Azimuth/zenith pair in radians."""

    azimuth: float
    zenith: float

    def __post_init__(self):
        if not 0.0 <= self.zenith <= np.pi:
            raise ValueError(f"zenith {self.zenith} outside [0, pi]")
        if not -np.pi < self.azimuth <= np.pi:
            raise ValueError(f"azimuth {self.azimuth} outside (-pi, pi]")

    @classmethod
    def from_degrees(cls, azimuth_deg, zenith_deg):
        return cls(float(np.deg2rad(azimuth_deg)), float(np.deg2rad(zenith_deg)))

    def unit_vector(self):
        return angles_to_direction(self)


@dataclass(frozen=True)
class RisGeometry:
    """
    UPA layout of the surface together with the feeding antenna position.

    Attributes
    ----------
    n_h, n_v : int
        Element counts along x and z.
    spacing : float
        Element pitch in meters.
    wavelength : float
        Carrier wavelength in meters.
    feed_position : tuple of float
        Feeding antenna position (m) in the RIS frame.
    """

    n_h: int
    n_v: int
    spacing: float
    wavelength: float
    feed_position: tuple = (0.0, -1.0, 0.0)

    def __post_init__(self):
        if int(self.n_h) < 1 or int(self.n_v) < 1:
            raise ValueError("n_h and n_v must be >= 1")
        if not self.spacing > 0 or not self.wavelength > 0:
            raise ValueError("spacing and wavelength must be positive")
        object.__setattr__(self, "n_h", int(self.n_h))
        object.__setattr__(self, "n_v", int(self.n_v))
        object.__setattr__(
            self, "feed_position", tuple(float(c) for c in self.feed_position)
        )
        if len(self.feed_position) != 3:
            raise ValueError("feed_position must have three coordinates")

    @classmethod
    def half_wavelength(cls, n_h, n_v, f0, feed_position=(0.0, -1.0, 0.0)):
        """Build a lambda/2-spaced array for carrier frequency `f0` (Hz)."""
        lam = SPEED_OF_LIGHT / f0
        return cls(n_h, n_v, lam / 2, lam, tuple(feed_position))

    @property
    def n(self):
        return self.n_h * self.n_v

    @property
    def wavenumber(self):
        return 2 * np.pi / self.wavelength


def element_positions(geom):
    """Element positions, shape (N, 3), reference element first at the origin."""
    ix = np.arange(geom.n_h)
    iz = np.arange(geom.n_v)
    zz, xx = np.meshgrid(iz, ix, indexing="ij")
    pos = np.zeros((geom.n, 3))
    pos[:, 0] = xx.ravel() * geom.spacing
    pos[:, 2] = zz.ravel() * geom.spacing
    return pos


def feed_distances(geom):
    """Distances (m) from the feeding antenna to every element, shape (N,)."""
    delta = np.linalg.norm(element_positions(geom) - np.asarray(geom.feed_position), axis=1)
    if np.any(delta == 0):
        raise ZeroDistance(
            f"feed at {geom.feed_position} coincides with element "
            f"{int(np.flatnonzero(delta == 0)[0]) + 1}"
        )
    return delta


def _direction_cosines(azimuth, zenith):
    azimuth = np.asarray(azimuth, dtype=float)
    zenith = np.asarray(zenith, dtype=float)
    return np.cos(azimuth) * np.sin(zenith), np.cos(zenith)


def steering_vector(geom, direction):
    """
    Far-field array response v = v_z kron v_x toward `direction`.

    Returns a unit-modulus complex vector of length N whose first entry is 1.
    """
    ux, uz = _direction_cosines(direction.azimuth, direction.zenith)
    kd = geom.wavenumber * geom.spacing
    v_x = np.exp(1j * kd * np.arange(geom.n_h) * ux)
    v_z = np.exp(1j * kd * np.arange(geom.n_v) * uz)
    return np.kron(v_z, v_x)


def steering_matrix(geom, azimuth, zenith):
    """
    Batched steering vectors, shape (K, N), for angle arrays of length K.

    Row k equals ``steering_vector(geom, Direction(azimuth[k], zenith[k]))``.
    """
    ux, uz = _direction_cosines(np.atleast_1d(azimuth), np.atleast_1d(zenith))
    kd = geom.wavenumber * geom.spacing
    phase_x = kd * ux[:, None] * np.arange(geom.n_h)[None, :]
    phase_z = kd * uz[:, None] * np.arange(geom.n_v)[None, :]
    phase = phase_z[:, :, None] + phase_x[:, None, :]
    return np.exp(1j * phase.reshape(len(ux), geom.n))


def direction_to_angles(u):
    """
    Convert a unit vector to a Direction.

    Azimuth is atan2(y, x); at the poles (x = y = 0) it is 0 by convention.
    """
    x, y, z = (float(c) for c in u)
    zenith = float(np.arccos(np.clip(z, -1.0, 1.0)))
    azimuth = 0.0 if x == 0.0 and y == 0.0 else float(np.arctan2(y, x))
    if azimuth == -np.pi:
        azimuth = np.pi
    return Direction(azimuth, zenith)


def angles_to_direction(d):
    """Unit vector (x, y, z) pointing along Direction `d`."""
    sz = np.sin(d.zenith)
    return np.array([np.cos(d.azimuth) * sz, np.sin(d.azimuth) * sz, np.cos(d.zenith)])


def vectors_to_angles(u):
    """Vectorized direction_to_angles for an array of unit vectors, shape (K, 3)."""
    u = np.asarray(u, dtype=float)
    zenith = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
    pole = (u[:, 0] == 0) & (u[:, 1] == 0)
    azimuth = np.where(pole, 0.0, np.arctan2(u[:, 1], u[:, 0]))
    azimuth = np.where(azimuth == -np.pi, np.pi, azimuth)
    return azimuth, zenith
