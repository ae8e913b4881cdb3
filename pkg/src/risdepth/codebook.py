"""
Rectangular sensing grid and the RIS interaction codebook.

The grid is a pinhole lattice: points (x, 1, z) on the plane y = 1 with x
spanning [-tan(fov/2), tan(fov/2)] and z spanning that extent divided by
the aspect ratio, endpoints included. Beam m = v * nbar_h + h (0-based)
with row v = 0 at the top (+z) and column h = 0 at -x.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGrid
from .geometry import Direction, steering_matrix, steering_vector, vectors_to_angles

DEFAULT_CHUNK = 1024


@dataclass(frozen=True)
class SceneGrid:
    fov: float
    aspect: float
    nbar_h: int
    nbar_v: int
    unit_vectors: np.ndarray = field(repr=False, compare=False)
    azimuth: np.ndarray = field(repr=False, compare=False)
    zenith: np.ndarray = field(repr=False, compare=False)

    @property
    def m(self):
        return self.nbar_h * self.nbar_v

    @property
    def half_width(self):
        return float(np.tan(self.fov / 2))

    @property
    def half_height(self):
        return self.half_width / self.aspect

    def direction(self, m):
        return Direction(float(self.azimuth[m]), float(self.zenith[m]))

    def index(self, row, col):
        """Linear beam index of 0-based pixel (row, col)."""
        return row * self.nbar_h + col

    def boresight_component(self):
        """y-component of every grid direction, shaped (nbar_v, nbar_h)."""
        return self.unit_vectors[:, 1].reshape(self.nbar_v, self.nbar_h)


def _axis(extent, count):
    if count == 1:
        return np.zeros(1)
    return np.linspace(-extent, extent, count)


def build_grid(fov, aspect, nbar_h, nbar_v):
    """
    Build the oversampled rectangular direction set.

    Parameters
    ----------
    fov : float
        Full horizontal field of view in radians, centred on boresight.
    aspect : float
        Width/height ratio of the image.
    nbar_h, nbar_v : int
        Horizontal and vertical grid counts.
    """
    nbar_h, nbar_v = int(nbar_h), int(nbar_v)
    if nbar_h < 1 or nbar_v < 1:
        raise DegenerateGrid("grid counts must be >= 1")
    if not 0 < fov < np.pi:
        raise DegenerateGrid(f"fov {fov} rad outside (0, pi)")
    if not aspect > 0:
        raise DegenerateGrid("aspect ratio must be positive")
    if nbar_h == 1 and nbar_v > 1:
        raise DegenerateGrid("a single horizontal grid point cannot span a nonzero field of view")
    tx = np.tan(fov / 2)
    xs = _axis(tx, nbar_h)
    zs = _axis(tx / aspect, nbar_v)[::-1]
    zz, xx = np.meshgrid(zs, xs, indexing="ij")
    pts = np.stack([xx.ravel(), np.ones(xx.size), zz.ravel()], axis=1)
    u = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    az, ze = vectors_to_angles(u)
    return SceneGrid(float(fov), float(aspect), nbar_h, nbar_v, u, az, ze)


def _feed_compensation(fc, geom):
    return np.exp(-2j * np.pi * (fc.delta - fc.delta1) / geom.wavelength)


def design_vector(theta, fc, geom):
    """
    Equal-gain conjugate interaction vector steering toward `theta`.

    Conjugates the phases of v(theta) times the near-field feed phase so that
    (g * psi)^T v(theta) adds every element in phase.
    """
    return np.conj(steering_vector(geom, theta) * _feed_compensation(fc, geom))


@dataclass
class Codebook:
    """
    Ordered set of interaction vectors, one per grid direction.

    The full M x N matrix is only materialized on request (`psi`);
    `beam_products` streams over fixed-size chunks instead.
    """

    grid: SceneGrid
    geom: object
    fc: object
    chunk: int = DEFAULT_CHUNK
    _psi: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.grid.m

    @property
    def m(self):
        return self.grid.m

    def rows(self, start, stop):
        """Interaction vectors for beams start..stop-1, shape (stop-start, N)."""
        if self._psi is not None:
            return self._psi[start:stop]
        v = steering_matrix(self.geom, self.grid.azimuth[start:stop], self.grid.zenith[start:stop])
        return np.conj(v * _feed_compensation(self.fc, self.geom)[None, :])

    @property
    def psi(self):
        if self._psi is None:
            self._psi = self.rows(0, self.m)
        return self._psi

    def chunks(self):
        for start in range(0, self.m, self.chunk):
            yield start, min(start + self.chunk, self.m)

    def beam_products(self, w):
        """
        Inner products psi_m^T w for every beam.

        `w` has shape (N,) or (N, P); the result has shape (M,) or (M, P).
        """
        w = np.asarray(w)
        out = np.empty((self.m,) + w.shape[1:], dtype=complex)
        for start, stop in self.chunks():
            out[start:stop] = self.rows(start, stop) @ w
        return out


def build_codebook(grid, fc, geom, chunk=DEFAULT_CHUNK):
    return Codebook(grid, geom, fc, chunk)


def export_codebook_csv(codebook, file):
    """Write `m,az_deg,ze_deg` rows, one per beam."""
    az = np.rad2deg(codebook.grid.azimuth)
    ze = np.rad2deg(codebook.grid.zenith)
    with open(file, "w", encoding="utf-8", newline="") as fh:
        fh.write("m,az_deg,ze_deg\n")
        for m in range(codebook.m):
            fh.write(f"{m},{az[m]:.12g},{ze[m]:.12g}\n")


def export_phase_table(codebook, file):
    """Write element phases (rad) as little-endian float64, N x M column-major."""
    with open(file, "wb") as fh:
        for start, stop in codebook.chunks():
            fh.write(np.angle(codebook.rows(start, stop)).astype("<f8").tobytes())


def load_phase_table(file, n):
    """Read a phase table back as an (M, N) array of phases."""
    data = np.fromfile(file, dtype="<f8")
    return data.reshape(-1, n)
