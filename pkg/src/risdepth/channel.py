"""
Two-hop RIS channel: radar -> RIS -> scene -> RIS -> radar.

Each path contributes

    h[m] = fwd_gain * ((g * psi_m)^T v(depart)) * bwd_gain * ((g * psi_m)^T v(arrive))

where g is the feed channel normalized to the reference element and the
hop gains carry the reference-element propagation.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .geometry import feed_distances, steering_vector


@dataclass(frozen=True)
class AntennaPattern:
    """Feeding antenna gain toward the RIS. Only a constant gain is modeled."""

    peak_gain: float = 1.0
    kind: str = "fixed"

    def __post_init__(self):
        if not self.peak_gain > 0:
            raise ValueError("antenna gain must be positive")
        if self.kind not in ("fixed", "isotropic"):
            raise ValueError(f"unsupported antenna pattern {self.kind!r}")

    @classmethod
    def from_dbi(cls, gain_dbi):
        return cls(10 ** (gain_dbi / 10), "fixed")

    def gain(self, direction=None):
        return 1.0 if self.kind == "isotropic" else self.peak_gain


@dataclass(frozen=True)
class ElementPattern:
    """RIS element radar cross-section gain; isotropic only."""

    gain_value: float = 1.0
    kind: str = "isotropic"

    def __post_init__(self):
        if not self.gain_value > 0:
            raise ValueError("element gain must be positive")
        if self.kind != "isotropic":
            raise NotImplementedError("only isotropic element patterns are modeled")

    def gain(self, direction_in=None, direction_out=None):
        return self.gain_value


@dataclass(frozen=True)
class FeedChannel:
    g: np.ndarray
    delta: np.ndarray
    delta1: float


def feed_channel(geom, feed_pat=None, elem_pat=None):
    """
    Normalized near-field feed channel.

    With direction-independent patterns the gain ratios cancel and
    g_n = (delta_1 / delta_n) exp(-j 2 pi (delta_n - delta_1) / lambda).
    """
    feed_pat = feed_pat or AntennaPattern()
    elem_pat = elem_pat or ElementPattern()
    delta = feed_distances(geom)
    d1 = float(delta[0])
    # constant patterns: G*zeta cancels between element n and the reference
    mag = np.sqrt((feed_pat.gain() * elem_pat.gain() * d1**2) / (feed_pat.gain() * elem_pat.gain() * delta**2))
    g = mag * np.exp(-2j * np.pi * (delta - d1) / geom.wavelength)
    g[0] = 1.0
    return FeedChannel(g, delta, d1)


def forward_gain(path, delta1, wavelength, feed_pat=None, elem_pat=None):
    """Radar -> reference element -> target hop gain."""
    feed_pat = feed_pat or AntennaPattern()
    elem_pat = elem_pat or ElementPattern()
    power = (feed_pat.gain() * elem_pat.gain()) / (
        (4 * np.pi) ** 2 * delta1**2 * path.fwd_dist**2 * path.fwd_loss
    )
    return np.sqrt(power) * np.exp(-2j * np.pi * (delta1 + path.fwd_dist) / wavelength)


def backward_gain(path, delta1, wavelength, feed_pat=None, elem_pat=None):
    """Target -> reference element -> radar hop gain (radar-equation hop)."""
    feed_pat = feed_pat or AntennaPattern()
    elem_pat = elem_pat or ElementPattern()
    power = (path.rcs * elem_pat.gain() * feed_pat.gain() * wavelength**2) / (
        (4 * np.pi) ** 3 * path.bwd_dist**2 * delta1**2 * path.bwd_loss
    )
    return np.sqrt(power) * np.exp(-2j * np.pi * (path.bwd_dist + delta1) / wavelength)


def hop_gains(path, fc, geom, feed_pat=None, elem_pat=None):
    """Product of forward and backward hop gains for one path."""
    return forward_gain(path, fc.delta1, geom.wavelength, feed_pat, elem_pat) * backward_gain(
        path, fc.delta1, geom.wavelength, feed_pat, elem_pat
    )


def path_gain(path, psi, fc, geom, feed_pat=None, elem_pat=None):
    """Complex gain h of `path` under interaction vector `psi`."""
    psi = np.asarray(psi)
    if psi.shape != (geom.n,):
        raise DimensionMismatch(f"psi has shape {psi.shape}, expected ({geom.n},)")
    gpsi = fc.g * psi
    a_fwd = gpsi @ steering_vector(geom, path.depart)
    a_bwd = gpsi @ steering_vector(geom, path.arrive)
    gf = forward_gain(path, fc.delta1, geom.wavelength, feed_pat, elem_pat)
    gb = backward_gain(path, fc.delta1, geom.wavelength, feed_pat, elem_pat)
    return (gf * a_fwd) * (gb * a_bwd)


def codebook_gains(paths, codebook, fc, geom, feed_pat=None, elem_pat=None):
    """
    Gains h[p, m] for every path p and codebook beam m, shape (P, M).

    Equivalent to calling path_gain for every (path, beam) pair.
    """
    if not paths:
        return np.zeros((0, codebook.m), dtype=complex)
    n_paths = len(paths)
    w = np.stack(
        [fc.g * steering_vector(geom, p.depart) for p in paths]
        + [fc.g * steering_vector(geom, p.arrive) for p in paths],
        axis=1,
    )
    a = codebook.beam_products(w)
    a_fwd, a_bwd = a[:, :n_paths], a[:, n_paths:]
    gf = np.array([forward_gain(p, fc.delta1, geom.wavelength, feed_pat, elem_pat) for p in paths])
    gb = np.array([backward_gain(p, fc.delta1, geom.wavelength, feed_pat, elem_pat) for p in paths])
    return ((gf[None, :] * a_fwd) * (gb[None, :] * a_bwd)).T


def equal_gain_bound(path, fc, geom, feed_pat=None, elem_pat=None):
    """Upper bound |fwd * bwd| (sum_n |g_n|)^2 on |h| over unit-modulus psi."""
    return abs(hop_gains(path, fc, geom, feed_pat, elem_pat)) * np.sum(np.abs(fc.g)) ** 2
