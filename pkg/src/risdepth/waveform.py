"""
FMCW chirp parameters, IF-signal synthesis and the sensing-matrix sweep.

Power bookkeeping: transmit power is carried in milliwatts (times an
optional `energy_scale`), so each path's receive amplitude sqrt(rho) is in
sqrt(mW) and the thermal noise variance kT*BW*NF is expressed in mW too.
Only the resulting SNR matters for estimation.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os
import struct

import numpy as np

from .channel import codebook_gains
from .errors import ConfigError, DimensionMismatch, RangeOverflow
from .geometry import SPEED_OF_LIGHT

THERMAL_NOISE_DBM_PER_HZ = -174.0
# relative slack when comparing the ADC capture window to the chirp duration
TIMING_RTOL = 1e-3
COLUMN_BLOCK = 256

Z_MAGIC = b"RISZ"
Z_HEADER = struct.Struct("<4sIIQ12x")


@dataclass(frozen=True)
class RadarConfig:
    """
    Chirp, ADC and power settings of the FMCW transceiver.

    Attributes
    ----------
    f0 : float
        Starting chirp frequency (Hz).
    slope : float
        Chirp slope (Hz/s).
    t_active, t_pri : float
        Chirp duration and chirp repetition interval (s).
    fs : float
        ADC sampling rate (samples/s).
    m_sample : int
        ADC samples per chirp.
    tx_power_dbm : float
        Transmit power; sets the transmit energy scale in mW.
    noise_figure_db : float
        Receiver noise figure.
    rng_seed : int
        Seed for the receiver noise streams.
    thermal_noise : bool
        Add receiver noise at all.
    energy_scale : float
        Extra multiplier on the transmit energy (chirp-duration factor).
    """

    f0: float = 60e9
    slope: float = 300e12
    t_active: float = 13.47e-6
    t_pri: float = 13.47e-6
    fs: float = 38e6
    m_sample: int = 512
    tx_power_dbm: float = 20.0
    noise_figure_db: float = 10.0
    rng_seed: int = 0
    thermal_noise: bool = True
    energy_scale: float = 1.0

    def violations(self):
        """Every violated constraint, as short human-readable names."""
        out = []
        for name in ("f0", "slope", "t_active", "t_pri", "fs"):
            if not (np.isfinite(getattr(self, name)) and getattr(self, name) > 0):
                out.append(f"{name} must be positive")
        if int(self.m_sample) != self.m_sample or self.m_sample < 1:
            out.append("m_sample must be a positive integer")
        if out:
            return out
        if self.t_active > self.t_pri:
            out.append("chirp exceeds PRI")
        if self.m_sample / self.fs > self.t_active * (1 + TIMING_RTOL):
            out.append("ADC capture exceeds chirp duration")
        if not self.energy_scale > 0:
            out.append("energy_scale must be positive")
        if int(self.rng_seed) != self.rng_seed or not 0 <= self.rng_seed < 2**64:
            out.append("rng_seed must be an unsigned 64-bit integer")
        return out

    def check(self):
        v = self.violations()
        if v:
            raise ConfigError(v)
        return self

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.f0

    @property
    def tx_energy(self):
        return 10 ** (self.tx_power_dbm / 10) * self.energy_scale

    @property
    def noise_power(self):
        """Thermal noise variance kT*BW*NF in mW."""
        bw = self.slope * self.t_active
        dbm = THERMAL_NOISE_DBM_PER_HZ + 10 * np.log10(bw) + self.noise_figure_db
        return 10 ** (dbm / 10)

    @property
    def sample_times(self):
        return np.arange(self.m_sample) / self.fs


@dataclass(frozen=True)
class DerivedParams:
    bw: float
    delta_r: float
    r_max: float
    chirp_rate: float

    def frame_rate(self, m):
        """Depth-map rate (Hz) when one frame sweeps `m` beams."""
        return self.chirp_rate / m


def derived_params(cfg):
    """Bandwidth, range resolution, maximum range and chirp rate of `cfg`."""
    bw = cfg.slope * cfg.t_active
    return DerivedParams(
        bw=bw,
        delta_r=SPEED_OF_LIGHT / (2 * bw),
        r_max=cfg.fs * SPEED_OF_LIGHT / (2 * cfg.slope),
        chirp_rate=1.0 / cfg.t_pri,
    )


def beat_bin(total_distance, cfg):
    """Fractional FFT bin S * xi * M_sample / F_S of a path of length `total_distance`."""
    return cfg.slope * (total_distance / SPEED_OF_LIGHT) * cfg.m_sample / cfg.fs


@dataclass
class SensingMatrix:
    z: np.ndarray
    config: RadarConfig
    codebook_id: str = ""
    seed: int = 0

    @property
    def shape(self):
        return self.z.shape


def _range_phases(total_distances, cfg):
    """exp(j Xi[s, p]), shape (M_sample, P)."""
    xi = np.asarray(total_distances, dtype=float) / SPEED_OF_LIGHT
    if np.any(xi >= cfg.t_active):
        raise RangeOverflow(
            f"path delay {xi.max():.4g} s is not below the chirp duration {cfg.t_active:.4g} s"
        )
    t = cfg.sample_times[:, None]
    # keep the f0*xi carrier term in [0, 1) cycles for precision
    cycles = np.mod(cfg.f0 * xi, 1.0)[None, :] + cfg.slope * t * xi[None, :] - 0.5 * cfg.slope * xi[None, :] ** 2
    return np.exp(2j * np.pi * cycles)


def noise_column(cfg, m, seed=None):
    """
    Receiver noise w[s, m] exp(j chi[s]) for beam `m`.

    Each beam draws from its own Philox stream keyed by the seed with the
    beam index in the counter, so columns are reproducible in any order.
    """
    seed = cfg.rng_seed if seed is None else seed
    rng = np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(m), 0]))
    w = rng.standard_normal((2, cfg.m_sample))
    w = np.sqrt(cfg.noise_power / 2) * (w[0] + 1j * w[1])
    t = cfg.sample_times
    chi = 2 * np.pi * cfg.f0 * t + np.pi * cfg.slope * t**2
    return w * np.exp(1j * chi)


def _synthesize(phases, gains, cfg, beams, seed, noise):
    """Columns for `beams` given per-path range phases (S, P) and gains (P, B)."""
    amp = np.sqrt(cfg.tx_energy) * np.conj(gains)
    z = phases @ amp if phases.shape[1] else np.zeros((cfg.m_sample, len(beams)), dtype=complex)
    if noise:
        for j, m in enumerate(beams):
            z[:, j] += noise_column(cfg, m, seed)
    return z


def if_signal(gains, total_distances, cfg, m=0, noise=None, seed=None):
    """
    Receive IF samples z[:, m] for one interaction vector.

    Parameters
    ----------
    gains : array_like of complex, shape (P,)
        Channel gains h[m] of every path under beam m.
    total_distances : array_like of float, shape (P,)
        Total propagation length R of every path (m).
    noise : bool, optional
        Add receiver noise; defaults to ``cfg.thermal_noise``.
    """
    gains = np.atleast_1d(np.asarray(gains, dtype=complex))
    total_distances = np.atleast_1d(np.asarray(total_distances, dtype=float))
    if gains.shape != total_distances.shape:
        raise DimensionMismatch("one gain per path distance is required")
    noise = cfg.thermal_noise if noise is None else noise
    phases = _range_phases(total_distances, cfg)
    return _synthesize(phases, gains[:, None], cfg, [m], seed, noise)[:, 0]


def sweep(paths, codebook, fc, cfg, feed_pat=None, elem_pat=None, workers=None,
          noise=None, seed=None, progress=None):
    """
    Sweep the codebook and assemble the sensing matrix Z (M_sample x M).

    Columns are produced in fixed blocks; `workers` only changes who
    computes a block, never the numbers in it.
    """
    if codebook.m < 1:
        raise DimensionMismatch("codebook is empty")
    noise = cfg.thermal_noise if noise is None else noise
    seed = cfg.rng_seed if seed is None else seed
    distances = [p.total_distance(fc.delta1) for p in paths]
    phases = _range_phases(distances, cfg)
    gains = codebook_gains(paths, codebook, fc, codebook.geom, feed_pat, elem_pat)
    z = np.empty((cfg.m_sample, codebook.m), dtype=complex)

    def work(start):
        stop = min(start + COLUMN_BLOCK, codebook.m)
        z[:, start:stop] = _synthesize(phases, gains[:, start:stop], cfg, range(start, stop), seed, noise)
        return stop - start

    starts = range(0, codebook.m, COLUMN_BLOCK)
    workers = workers or os.cpu_count() or 1
    done = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for n in pool.map(work, starts):
            done += n
            if progress:
                progress(done, codebook.m)
    return SensingMatrix(z, cfg, codebook_id=f"{codebook.grid.nbar_v}x{codebook.grid.nbar_h}", seed=int(seed))


def write_z_dump(file, sm):
    """Binary dump: 32-byte header, then column-major interleaved <f8 (re, im)."""
    m_sample, m = sm.z.shape
    with open(file, "wb") as fh:
        fh.write(Z_HEADER.pack(Z_MAGIC, m_sample, m, int(sm.seed)))
        fh.write(np.ascontiguousarray(sm.z.T).astype("<c16").tobytes())


def read_z_dump(file):
    """Read a dump written by write_z_dump; returns (z, seed)."""
    with open(file, "rb") as fh:
        head = fh.read(Z_HEADER.size)
        if len(head) != Z_HEADER.size:
            raise ValueError(f"{file}: truncated header")
        magic, m_sample, m, seed = Z_HEADER.unpack(head)
        if magic != Z_MAGIC:
            raise ValueError(f"{file}: bad magic {magic!r}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != m_sample * m:
        raise ValueError(f"{file}: expected {m_sample * m} samples, found {data.size}")
    return data.reshape(m, m_sample).T.astype(complex), seed
