"""
JSON run configuration.

One file fully determines a run. Example::

    {
      "schema_version": 1,
      "seed": 7,
      "radar": {"f0_hz": 60e9, "slope_hz_per_s": 300e12, "t_active_s": 13.47e-6,
                "t_pri_s": 13.47e-6, "fs_hz": 38e6, "m_sample": 512,
                "tx_power_dbm": 20, "noise_figure_db": 10},
      "ris": {"n_h": 8, "n_v": 8, "feed_position_m": [0.0, -0.3, 0.0], "feed_gain_dbi": 25},
      "grid": {"fov_deg": 60, "aspect": 1.0, "os_h": 2, "os_v": 2},
      "scene": {"targets": [{"id": 1, "position_m": [0, 4, 0], "rcs_m2": 1.0}],
                "paths_csv": null},
      "processing": {"window": "rect", "interp": "nearest", "upscale": null},
      "outputs": {"depth_pgm": "out/depth.pgm", "depth_csv": "out/depth.csv",
                  "metrics_json": "out/metrics.json", "z_dump": null, "figure": null}
    }

Relative file names are resolved against the directory holding the config.
"""
from dataclasses import dataclass, field, replace
import json
import math
from pathlib import Path

from .channel import AntennaPattern, ElementPattern
from .errors import ConfigError, RisDepthError
from .geometry import SPEED_OF_LIGHT, RisGeometry, feed_distances
from .scene import PropagationPath, Scene, Target, load_paths
from .waveform import RadarConfig

SCHEMA_VERSION = 1
OUTPUT_KEYS = ("depth_pgm", "depth_csv", "metrics_json", "z_dump", "figure",
               "codebook_csv", "codebook_phases")

_RADAR_KEYS = {
    "f0_hz": "f0",
    "slope_hz_per_s": "slope",
    "t_active_s": "t_active",
    "t_pri_s": "t_pri",
    "fs_hz": "fs",
    "m_sample": "m_sample",
    "tx_power_dbm": "tx_power_dbm",
    "noise_figure_db": "noise_figure_db",
    "thermal_noise": "thermal_noise",
    "energy_scale": "energy_scale",
}


@dataclass
class RunConfig:
    radar: RadarConfig
    ris: RisGeometry
    feed_pattern: AntennaPattern
    element_pattern: ElementPattern
    fov_deg: float
    aspect: float
    os_h: int
    os_v: int
    scene: Scene
    paths_csv: Path = None
    background_m: float = None
    window: str = "rect"
    interp: str = "nearest"
    upscale: tuple = None
    outputs: dict = field(default_factory=dict)
    meters_per_level: float = 0.001
    seed: int = 0
    base_dir: Path = Path(".")

    @property
    def nbar_h(self):
        return self.ris.n_h * self.os_h

    @property
    def nbar_v(self):
        return self.ris.n_v * self.os_v

    def with_seed(self, seed):
        return replace(self, seed=int(seed), radar=replace(self.radar, rng_seed=int(seed)))


def _num(section, key, default=None, required=False, problems=None, kind=float):
    if key not in section or section[key] is None:
        if required:
            problems.append(f"missing required field {key!r}")
        return default
    val = section[key]
    if isinstance(val, bool) and kind is not bool:
        problems.append(f"field {key!r} must be numeric")
        return default
    try:
        return kind(val)
    except (TypeError, ValueError):
        problems.append(f"field {key!r} must be {kind.__name__}")
        return default


def parse_upscale(text):
    """Parse "WxH" into (W, H)."""
    try:
        w, h = (int(p) for p in str(text).lower().split("x"))
    except ValueError:
        raise ValueError(f"upscale must look like 640x480, got {text!r}") from None
    if w < 1 or h < 1:
        raise ValueError("upscale dimensions must be positive")
    return w, h


def _parse(raw, base_dir):
    """Build a RunConfig from parsed JSON; returns (config or None, problems)."""
    problems = []
    if not isinstance(raw, dict):
        return None, ["config root must be a JSON object"]
    if raw.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version must be {SCHEMA_VERSION}")
    seed = _num(raw, "seed", 0, problems=problems, kind=int)

    radar_raw = raw.get("radar") or {}
    kwargs = {}
    for key, attr in _RADAR_KEYS.items():
        if key in radar_raw:
            kind = bool if attr == "thermal_noise" else int if attr == "m_sample" else float
            kwargs[attr] = _num(radar_raw, key, problems=problems, kind=kind)
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    unknown = set(radar_raw) - set(_RADAR_KEYS)
    if unknown:
        problems.append(f"unknown radar fields: {', '.join(sorted(unknown))}")
    radar = RadarConfig(rng_seed=seed if seed is not None and seed >= 0 else 0, **kwargs)
    if seed is not None and seed < 0:
        problems.append("seed must be nonnegative")
    problems.extend(radar.violations())

    ris_raw = raw.get("ris") or {}
    n_h = _num(ris_raw, "n_h", None, True, problems, int)
    n_v = _num(ris_raw, "n_v", None, True, problems, int)
    feed = ris_raw.get("feed_position_m", [0.0, -1.0, 0.0])
    wavelength = SPEED_OF_LIGHT / radar.f0 if radar.f0 and radar.f0 > 0 else None
    spacing = _num(ris_raw, "spacing_m", None, problems=problems)
    if spacing is None and wavelength:
        spacing = wavelength / 2
    geom = None
    if n_h is not None and n_v is not None and wavelength:
        try:
            geom = RisGeometry(n_h, n_v, spacing, wavelength, tuple(feed))
            feed_distances(geom)
        except (ValueError, TypeError) as exc:
            problems.append(f"ris: {exc}")
            geom = None
    try:
        feed_pat = AntennaPattern.from_dbi(_num(ris_raw, "feed_gain_dbi", 25.0, problems=problems))
        elem_pat = ElementPattern(_num(ris_raw, "element_gain", 1.0, problems=problems))
    except (ValueError, NotImplementedError) as exc:
        problems.append(f"ris: {exc}")
        feed_pat, elem_pat = AntennaPattern(), ElementPattern()

    grid_raw = raw.get("grid") or {}
    fov_deg = _num(grid_raw, "fov_deg", None, True, problems)
    aspect = _num(grid_raw, "aspect", 1.0, problems=problems)
    os_h = _num(grid_raw, "os_h", 1, problems=problems, kind=int)
    os_v = _num(grid_raw, "os_v", 1, problems=problems, kind=int)
    if fov_deg is not None and not 0 < fov_deg < 180:
        problems.append("fov must lie in (0, 180) degrees")
    if aspect is not None and not aspect > 0:
        problems.append("aspect ratio must be positive")
    if (os_h is not None and os_h < 1) or (os_v is not None and os_v < 1):
        problems.append("oversampling factors must be >= 1")
    elif geom is not None and geom.n_h * os_h == 1 and geom.n_v * os_v > 1:
        problems.append("a single horizontal grid point cannot span the field of view")

    scene_raw = raw.get("scene") or {}
    targets = []
    for i, t in enumerate(scene_raw.get("targets") or []):
        try:
            targets.append(Target(tuple(t["position_m"]), float(t.get("rcs_m2", 1.0)), int(t.get("id", i))))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"target {i}: {exc}")
    injected = []
    paths_csv = scene_raw.get("paths_csv")
    if paths_csv:
        paths_csv = (base_dir / paths_csv).resolve()
        if not paths_csv.is_file():
            problems.append(f"paths_csv {paths_csv} does not exist")
        else:
            try:
                injected = load_paths(paths_csv)
            except (RisDepthError, OSError) as exc:
                problems.append(f"paths_csv: {exc}")
    scene = None
    try:
        scene = Scene(targets, injected)
    except ValueError as exc:
        problems.append(str(exc))
    if not targets and not injected:
        problems.append("scene has no targets and no paths")
    background = _num(scene_raw, "background_m", None, problems=problems)

    if geom is not None and scene is not None and not radar.violations():
        d1 = float(feed_distances(geom)[0])
        for t in targets:
            r = 2 * d1 + 2 * math.dist(t.position, (0, 0, 0))
            if r / SPEED_OF_LIGHT >= radar.t_active:
                problems.append(f"target {t.id} lies beyond the unambiguous delay of the chirp")
        for p in injected:
            if isinstance(p, PropagationPath) and p.total_distance(d1) / SPEED_OF_LIGHT >= radar.t_active:
                problems.append(f"path {p.target_id}/{p.path_id} lies beyond the unambiguous delay")

    proc = raw.get("processing") or {}
    window = proc.get("window", "rect")
    interp = proc.get("interp", "nearest")
    if window not in ("rect", "hann"):
        problems.append(f"window must be rect or hann, got {window!r}")
    if interp not in ("nearest", "bilinear"):
        problems.append(f"interp must be nearest or bilinear, got {interp!r}")
    upscale = proc.get("upscale")
    if upscale is not None:
        try:
            upscale = parse_upscale(upscale) if isinstance(upscale, str) else tuple(int(v) for v in upscale)
        except (ValueError, TypeError) as exc:
            problems.append(str(exc))
            upscale = None
    mpl = _num(proc, "meters_per_level", 0.001, problems=problems)
    if mpl is not None and not mpl > 0:
        problems.append("meters_per_level must be positive")

    out_raw = raw.get("outputs") or {}
    unknown = set(out_raw) - set(OUTPUT_KEYS)
    if unknown:
        problems.append(f"unknown outputs: {', '.join(sorted(unknown))}")
    outputs = {k: (base_dir / v).resolve() for k, v in out_raw.items() if v and k in OUTPUT_KEYS}

    if problems:
        return None, problems
    cfg = RunConfig(
        radar=radar, ris=geom, feed_pattern=feed_pat, element_pattern=elem_pat,
        fov_deg=fov_deg, aspect=aspect, os_h=os_h, os_v=os_v, scene=scene,
        paths_csv=paths_csv or None, background_m=background, window=window,
        interp=interp, upscale=upscale, outputs=outputs, meters_per_level=mpl,
        seed=seed, base_dir=base_dir,
    )
    return cfg, []


def validate_file(path):
    """All constraint violations of the config at `path` (empty when clean)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        return [f"cannot read config: {exc}"]
    except json.JSONDecodeError as exc:
        return [f"invalid JSON: {exc}"]
    return _parse(raw, path.resolve().parent)[1]


def load_config(path):
    """Parse and validate a config file; raises ConfigError listing every violation."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    cfg, problems = _parse(raw, path.resolve().parent)
    if problems:
        raise ConfigError(problems)
    return cfg


def config_from_dict(raw, base_dir="."):
    cfg, problems = _parse(raw, Path(base_dir).resolve())
    if problems:
        raise ConfigError(problems)
    return cfg
