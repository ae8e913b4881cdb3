"""
End-to-end depth estimation run: codebook -> sweep -> range profile ->
scene range -> range map -> depth map -> metrics, and artifact writing.
"""
from dataclasses import dataclass
from datetime import datetime, timezone
import json
import os
from pathlib import Path

import numpy as np

from . import __version__
from .channel import feed_channel
from .codebook import build_codebook, build_grid, export_codebook_csv, export_phase_table
from .depthmap import (
    DepthMap,
    metrics,
    range_map,
    range_profile,
    range_to_depth,
    scene_range,
    upscale,
    write_csv,
    write_pgm,
)
from .errors import DimensionMismatch
from .scene import ground_truth_depth, synthesize_paths
from .waveform import SensingMatrix, derived_params, read_z_dump, sweep, write_z_dump


@dataclass
class RunResult:
    config: object
    derived: object
    grid: object
    codebook: object
    fc: object
    sensing: SensingMatrix
    zrp: np.ndarray
    rhat: np.ndarray
    depth: DepthMap
    truth: DepthMap = None
    depth_up: DepthMap = None
    truth_up: DepthMap = None
    metrics: dict = None
    metrics_up: dict = None

    @property
    def output_depth(self):
        return self.depth_up if self.depth_up is not None else self.depth


def run_pipeline(cfg, workers=None, replay=None, progress=None):
    """Execute every processing step for `cfg`; nothing is written to disk."""
    dp = derived_params(cfg.radar)
    grid = build_grid(np.deg2rad(cfg.fov_deg), cfg.aspect, cfg.nbar_h, cfg.nbar_v)
    fc = feed_channel(cfg.ris, cfg.feed_pattern, cfg.element_pattern)
    cb = build_codebook(grid, fc, cfg.ris)

    if replay is not None:
        z, seed = read_z_dump(replay)
        if z.shape != (cfg.radar.m_sample, grid.m):
            raise DimensionMismatch(
                f"replay matrix {z.shape} does not match config ({cfg.radar.m_sample}, {grid.m})"
            )
        sm = SensingMatrix(z, cfg.radar, f"{grid.nbar_v}x{grid.nbar_h}", seed)
    else:
        paths = synthesize_paths(cfg.scene, cfg.ris)
        sm = sweep(paths, cb, fc, cfg.radar, cfg.feed_pattern, cfg.element_pattern,
                   workers=workers, progress=progress)

    rp = range_profile(sm.z, cfg.window)
    rhat = scene_range(rp, dp.delta_r)
    depth = range_to_depth(range_map(rhat, grid.nbar_h, grid.nbar_v), grid, fc.delta1)
    result = RunResult(cfg, dp, grid, cb, fc, sm, rp.zrp, rhat, depth)

    if cfg.scene.targets:
        background = cfg.background_m if cfg.background_m is not None else dp.r_max
        result.truth = ground_truth_depth(cfg.scene, grid, background)
        result.metrics = metrics(depth, result.truth)
    if cfg.upscale:
        w, h = cfg.upscale
        result.depth_up = upscale(depth, w, h, cfg.interp)
        if result.truth is not None:
            result.truth_up = upscale(result.truth, w, h, "nearest")
            result.metrics_up = metrics(result.depth_up, result.truth_up)
    return result


def metrics_report(result):
    """Structured metrics object; `metadata` is the only non-reproducible part."""
    m = result.metrics or {}
    report = {
        "rmse_m": m.get("rmse"),
        "mae_m": m.get("mae"),
        "m": result.grid.m,
        "nbar_h": result.grid.nbar_h,
        "nbar_v": result.grid.nbar_v,
        "seed": int(result.sensing.seed),
        "upscaled": None,
        "metadata": {
            "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "risdepth_version": __version__,
        },
    }
    if result.depth_up is not None:
        h, w = result.depth_up.shape
        mu = result.metrics_up or {}
        report["upscaled"] = {"width": w, "height": h, "rmse_m": mu.get("rmse"), "mae_m": mu.get("mae")}
    return report


def write_artifacts(result, outputs):
    """
    Write every requested artifact atomically.

    Files are first written next to their destination under a temporary
    name and renamed only when all of them succeeded.
    """
    cfg = result.config
    writers = {
        "depth_pgm": lambda p: write_pgm(result.output_depth, p, cfg.meters_per_level),
        "depth_csv": lambda p: write_csv(result.output_depth, p),
        "metrics_json": lambda p: Path(p).write_text(
            json.dumps(metrics_report(result), indent=2) + "\n", encoding="utf-8"),
        "z_dump": lambda p: write_z_dump(p, result.sensing),
        "codebook_csv": lambda p: export_codebook_csv(result.codebook, p),
        "codebook_phases": lambda p: export_phase_table(result.codebook, p),
        "figure": lambda p: _write_figure(result, p),
    }
    pending = []
    try:
        for key, dest in outputs.items():
            if not dest:
                continue
            dest = Path(dest)
            dest.parent.mkdir(parents=True, exist_ok=True)
            tmp = dest.with_name(f".{dest.name}.{os.getpid()}.tmp")
            pending.append((tmp, dest))
            writers[key](tmp)
    except BaseException:
        for tmp, _ in pending:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, dest in pending:
        os.replace(tmp, dest)
    return [dest for _, dest in pending]


def _write_figure(result, path):
    from .plotting import save_depth_report

    energy = np.sum(np.abs(result.zrp) ** 2, axis=0)
    column = result.zrp[:, int(np.argmax(energy))]
    truth = result.truth_up if result.depth_up is not None else result.truth
    save_depth_report(path, result.output_depth, truth, column, result.derived.delta_r)
