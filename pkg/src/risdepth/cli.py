"""
Command-line entry point.

    risdepth validate CONFIG
    risdepth run CONFIG [--seed N] [--workers N] [--z-dump PATH] [--replay PATH]
                        [--upscale WxH] [--window rect|hann] [--interp nearest|bilinear]
                        [--figure PATH]

Data and the summary table go to stdout, progress and errors to stderr.
Errors are emitted as a single JSON object on stderr with a nonzero exit.
"""
import argparse
from dataclasses import replace
import json
from pathlib import Path
import sys

from .config import load_config, parse_upscale, validate_file
from .errors import ConfigError, RisDepthError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _error(kind, message, violations=None):
    payload = {"error": kind, "message": message}
    if violations:
        payload["violations"] = violations
    print(json.dumps(payload), file=sys.stderr)


def _upscale_arg(text):
    try:
        return parse_upscale(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="risdepth", description="RIS-aided FMCW scene depth estimation."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config", type=Path)

    p_run = sub.add_parser("run", help="simulate the sweep and estimate the depth map")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker threads for the sweep (default: all cores)")
    p_run.add_argument("--z-dump", type=Path, default=None, help="write the sensing matrix here")
    p_run.add_argument("--replay", type=Path, default=None,
                       help="process a previously dumped sensing matrix instead of simulating")
    p_run.add_argument("--upscale", type=_upscale_arg, default=None, metavar="WxH")
    p_run.add_argument("--window", choices=("rect", "hann"), default=None)
    p_run.add_argument("--interp", choices=("nearest", "bilinear"), default=None)
    p_run.add_argument("--figure", type=Path, default=None, help="write a PNG report figure here")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    return parser


def summary_table(result):
    """Plain-text summary of derived parameters and errors."""
    dp = result.derived
    cfg = result.config
    m = result.grid.m
    rows = [
        ("RIS elements", f"{cfg.ris.n_h} x {cfg.ris.n_v}"),
        ("Grid (v x h)", f"{result.grid.nbar_v} x {result.grid.nbar_h}"),
        ("Bandwidth", f"{dp.bw / 1e9:.2f} GHz"),
        ("Range resolution", f"{dp.delta_r * 100:.2f} cm"),
        ("Maximum range", f"{dp.r_max:.2f} m"),
        ("Range ceiling", f"{(cfg.radar.m_sample - 1) * dp.delta_r:.2f} m"),
        ("Chirp rate", f"{dp.chirp_rate / 1e3:.1f} kHz"),
        ("Codebook size", f"{m}"),
        ("Depth map rate", f"{dp.frame_rate(m):.2f} Hz"),
        ("Feed distance", f"{result.fc.delta1:.4f} m"),
        ("Seed", f"{result.sensing.seed}"),
    ]
    if result.metrics is not None:
        rows.append(("RMSE", f"{result.metrics['rmse'] * 100:.2f} cm"))
        rows.append(("MAE", f"{result.metrics['mae'] * 100:.2f} cm"))
    if result.metrics_up is not None:
        rows.append(("RMSE (upscaled)", f"{result.metrics_up['rmse'] * 100:.2f} cm"))
        rows.append(("MAE (upscaled)", f"{result.metrics_up['mae'] * 100:.2f} cm"))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def cmd_validate(args):
    problems = validate_file(args.config)
    if problems:
        for p in problems:
            print(f"violation: {p}")
        return EXIT_CONFIG
    print("ok")
    return EXIT_OK


def cmd_run(args):
    from .pipeline import run_pipeline, write_artifacts

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _error("ConfigError", "invalid configuration", exc.violations)
        return EXIT_CONFIG
    if args.seed is not None:
        if args.seed < 0:
            _error("ConfigError", "seed must be nonnegative")
            return EXIT_CONFIG
        cfg = cfg.with_seed(args.seed)
    overrides = {}
    if args.upscale is not None:
        overrides["upscale"] = args.upscale
    if args.window is not None:
        overrides["window"] = args.window
    if args.interp is not None:
        overrides["interp"] = args.interp
    outputs = dict(cfg.outputs)
    if args.z_dump is not None:
        outputs["z_dump"] = args.z_dump
    if args.figure is not None:
        outputs["figure"] = args.figure
    cfg = replace(cfg, outputs=outputs, **overrides)
    if args.replay is not None and not args.replay.is_file():
        _error("ConfigError", f"replay file {args.replay} does not exist")
        return EXIT_CONFIG

    def progress(done, total):
        if not args.quiet:
            print(f"\rsweep {done}/{total} beams", end="" if done < total else "\n",
                  file=sys.stderr, flush=True)

    try:
        result = run_pipeline(cfg, workers=args.workers, replay=args.replay, progress=progress)
        written = write_artifacts(result, outputs)
    except RisDepthError as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_RUNTIME
    print(summary_table(result))
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args)
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
