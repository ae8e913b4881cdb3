"""
Post-processing of the sensing matrix into a depth map, plus error metrics
and depth-map file formats.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass
class RangeProfile:
    zrp: np.ndarray


@dataclass
class DepthMap:
    """Depth in meters on an image grid; `grid` is the SceneGrid it came from."""

    values: np.ndarray
    grid: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DimensionMismatch("depth map must be two-dimensional")

    @property
    def shape(self):
        return self.values.shape


def range_profile(z, window="rect"):
    """
    Column-wise DFT over the fast-time sample index.

    The transform is unitary (1/sqrt(M_sample) scaling). `window` is
    "rect" or "hann"; the window is applied before the transform.
    """
    z = getattr(z, "z", z)
    z = np.asarray(z)
    if z.ndim == 1:
        z = z[:, None]
    if z.size == 0:
        raise DimensionMismatch("empty sensing matrix")
    if window == "hann":
        z = z * np.hanning(z.shape[0])[:, None]
    elif window != "rect":
        raise ValueError(f"unknown window {window!r}")
    return RangeProfile(np.fft.fft(z, axis=0, norm="ortho"))


def scene_range(rp, delta_r):
    """
    One-way range estimate per beam: delta_r times the strongest bin.

    np.argmax returns the first maximum, so ties go to the smaller bin.
    """
    if not delta_r > 0:
        raise ValueError("range resolution must be positive")
    zrp = getattr(rp, "zrp", rp)
    return delta_r * np.argmax(np.abs(zrp), axis=0)


def range_map(rhat, nbar_h, nbar_v):
    """Arrange per-beam values into an (nbar_v, nbar_h) image, beam m -> (m // nbar_h, m % nbar_h)."""
    rhat = np.asarray(rhat)
    if rhat.ndim != 1 or rhat.size != nbar_h * nbar_v:
        raise DimensionMismatch(f"{rhat.size} values cannot fill a {nbar_v}x{nbar_h} map")
    return rhat.reshape(nbar_v, nbar_h)


def flatten_map(rmap):
    """Inverse of range_map."""
    return np.asarray(rmap).reshape(-1)


def range_to_depth(rmap, grid, delta1):
    """
    Project one-way range estimates to scene depth (y-coordinate).

    The estimate includes the feed-to-RIS leg, so delta1 is removed
    (clamped at zero) before scaling by each beam's boresight component.
    """
    rmap = np.asarray(rmap, dtype=float)
    if rmap.shape != (grid.nbar_v, grid.nbar_h):
        raise DimensionMismatch(f"range map {rmap.shape} does not match grid {(grid.nbar_v, grid.nbar_h)}")
    dist = np.maximum(rmap - delta1, 0.0)
    return DepthMap(dist * grid.boresight_component(), grid)


def _source_coords(n_in, n_out, interp):
    centres = (np.arange(n_out) + 0.5) * n_in / n_out
    if interp == "nearest":
        return np.minimum(np.floor(centres).astype(int), n_in - 1)
    return np.clip(centres - 0.5, 0.0, n_in - 1)


def _interp_axis(a, n_out, axis):
    n_in = a.shape[axis]
    pos = _source_coords(n_in, n_out, "bilinear")
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = pos - lo
    shape = [1, 1]
    shape[axis] = n_out
    frac = frac.reshape(shape)
    return np.take(a, lo, axis=axis) * (1 - frac) + np.take(a, hi, axis=axis) * frac


def upscale(dm, out_w, out_h, interp="nearest"):
    """
    Resample a depth map to out_h x out_w pixels.

    Nearest keeps depth edges sharp; bilinear is a convex combination of
    neighbours, so neither mode leaves the input's [min, max] range.
    """
    values = dm.values
    in_h, in_w = values.shape
    if out_w < in_w or out_h < in_h:
        raise ValueError(f"cannot upscale {in_w}x{in_h} to smaller {out_w}x{out_h}")
    if interp == "nearest":
        rows = _source_coords(in_h, out_h, "nearest")
        cols = _source_coords(in_w, out_w, "nearest")
        out = values[np.ix_(rows, cols)]
    elif interp == "bilinear":
        out = _interp_axis(_interp_axis(values, out_h, 0), out_w, 1)
        out = np.clip(out, values.min(), values.max())
    else:
        raise ValueError(f"unknown interpolation {interp!r}")
    return DepthMap(out, dm.grid)


def metrics(est, truth):
    """
    RMSE and MAE (meters) between two depth maps of equal shape.

    Both are means over the compared pixels.
    """
    a = getattr(est, "values", est)
    b = getattr(truth, "values", truth)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"depth maps differ in shape: {a.shape} vs {b.shape}")
    diff = a - b
    return {"rmse": float(np.sqrt(np.mean(diff**2))), "mae": float(np.mean(np.abs(diff)))}


def estimate_depth(z, grid, delta_r, delta1, window="rect"):
    """Full chain Z -> range profile -> ranges -> range map -> depth map."""
    rhat = scene_range(range_profile(z, window), delta_r)
    rmap = range_map(rhat, grid.nbar_h, grid.nbar_v)
    return range_to_depth(rmap, grid, delta1)


def write_pgm(dm, file, meters_per_level=0.001):
    """
    16-bit binary PGM, big-endian samples.

    The quantization step is recorded in a header comment; depths beyond
    65535 levels saturate.
    """
    levels = np.clip(np.rint(dm.values / meters_per_level), 0, 65535).astype(">u2")
    h, w = levels.shape
    header = f"P5\n# meters_per_level {meters_per_level!r}\n{w} {h}\n65535\n".encode("ascii")
    with open(file, "wb") as fh:
        fh.write(header)
        fh.write(levels.tobytes())


def read_pgm(file):
    """Read a file from write_pgm back into meters; returns (values, meters_per_level)."""
    with open(file, "rb") as fh:
        data = fh.read()
    tokens = []
    scale = None
    pos = 0
    while len(tokens) < 4:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "meters_per_level":
                scale = float(parts[1])
            continue
        tokens.extend(line.split())
    if tokens[0] != "P5" or int(tokens[3]) != 65535:
        raise ValueError(f"{file}: not a 16-bit binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    levels = np.frombuffer(data[pos:pos + 2 * w * h], dtype=">u2").reshape(h, w)
    scale = 1.0 if scale is None else scale
    return levels.astype(float) * scale, scale


def write_csv(dm, file):
    """Comma-separated depths (m), one image row per line."""
    with open(file, "w", encoding="utf-8", newline="") as fh:
        for row in dm.values:
            fh.write(",".join(f"{v:.6f}" for v in row) + "\n")


def read_csv(file):
    return np.loadtxt(file, delimiter=",", ndmin=2)
