"""Command-line entry point.

Subcommands:

- ``render``  — render a tilt trajectory CSV to a mono WAV file.
- ``stems``   — generate the stem bank for a seed and export it to a directory.
- ``analyze`` — print in-band energy fraction, RMS and peak for WAV files.
- ``serve``   — run the WebSocket control service.

Exit codes: 0 success, 1 constraint failure (analysis below the band
threshold), 2 input error (bad flags, config, or trajectory), 3 I/O error.
Output files are written atomically (temp file + rename), so a failed run
never leaves a partial artifact behind.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import AppConfig, load_config, validate_config
from .engine import (
    load_trajectory_csv,
    read_wav,
    render_trajectory,
    trajectory_final_gains,
    write_wav,
)
from .errors import ConfigurationError, DomainError, TrajectoryFormatError
from .gainmap import InstrumentId
from .stems import (
    MANIFEST_NAME,
    StemBank,
    export_stems,
    generate_stems,
    load_stems,
    verify_band,
)

EXIT_OK = 0
EXIT_CONSTRAINT = 1
EXIT_INPUT = 2
EXIT_IO = 3

BAND_MIN_FRACTION = 0.95


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiltmix",
        description="Tilt-controlled five-stem loop mixer: offline rendering, "
                    "stem export, audio analysis and a live control service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shared(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, metavar="PATH",
                       help="config file with 'key = value' lines")
        p.add_argument("--seed", type=int, default=None,
                       help="stem generation seed (overrides config)")
        p.add_argument("--sample-rate", type=int, default=None, dest="sample_rate",
                       metavar="HZ", help="44100 or 48000 (overrides config)")
        p.add_argument("--bpm", type=float, default=None,
                       help="loop tempo, 60-200 (overrides config)")

    render = sub.add_parser(
        "render", help="render a tilt trajectory CSV to a WAV file")
    render.add_argument("trajectory", type=Path,
                        help="CSV with header time_s,pitch_deg,roll_deg")
    render.add_argument("output", type=Path, help="output WAV path")
    add_shared(render)
    render.add_argument("--duration", type=float, default=None, metavar="S",
                        help="render length in seconds (default: trajectory end)")
    render.add_argument("--stems", type=Path, default=None, metavar="DIR",
                        help="use an exported stem bank instead of generating one")

    stems = sub.add_parser(
        "stems", help="generate the stem bank and export it to a directory")
    stems.add_argument("out_dir", type=Path, help="output directory")
    add_shared(stems)

    analyze = sub.add_parser(
        "analyze", help="report in-band fraction, RMS and peak for WAV files")
    analyze.add_argument("paths", nargs="+", type=Path,
                         help="WAV files and/or directories of WAV files")

    serve = sub.add_parser("serve", help="run the control service")
    add_shared(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--stems", type=Path, default=Path("stems"), dest="stems_dir",
                       metavar="DIR", help="stem directory (exported on startup "
                       "if missing)")
    serve.add_argument("--ui", type=Path, default=None, metavar="DIR",
                       help="static web UI directory to mount at /")
    return parser


def _resolve_config(args: argparse.Namespace) -> AppConfig:
    path = getattr(args, "config", None)
    if path is not None and not Path(path).exists():
        print(f"warning: config file {path} not found; using defaults",
              file=sys.stderr)
    cfg = load_config(path)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "sample_rate", None) is not None:
        overrides["sample_rate_hz"] = args.sample_rate
    if getattr(args, "bpm", None) is not None:
        overrides["bpm"] = args.bpm
    if overrides:
        cfg = validate_config(replace(cfg, **overrides))
    return cfg


def _obtain_bank(cfg: AppConfig, stems_dir: Path | None) -> StemBank:
    if stems_dir is not None:
        return load_stems(stems_dir)
    return generate_stems(cfg.seed, sample_rate_hz=cfg.sample_rate_hz, bpm=cfg.bpm)


def _rms_dbfs(buffer: np.ndarray) -> float:
    rms = float(np.sqrt(np.mean(np.square(buffer, dtype=np.float64))))
    return 20.0 * math.log10(rms) if rms > 0.0 else -math.inf


def _fmt_dbfs(value: float) -> str:
    return f"{value:7.2f} dBFS" if math.isfinite(value) else "   -inf dBFS"


def _cmd_render(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    trajectory = load_trajectory_csv(args.trajectory)
    bank = _obtain_bank(cfg, args.stems)
    audio = render_trajectory(bank, trajectory, cfg, duration_s=args.duration)
    write_wav(audio, bank.sample_rate_hz, args.output)

    duration = len(audio) / bank.sample_rate_hz
    peak = float(np.max(np.abs(audio)))
    gains, gate_on = trajectory_final_gains(
        trajectory, cfg, duration_s=args.duration,
        sample_rate_hz=bank.sample_rate_hz)
    print(f"wrote {args.output}: {duration:.3f} s, {len(audio)} samples, "
          f"peak {peak:.4f}")
    print(f"final gains (gate {'on' if gate_on else 'off'}):")
    for iid in InstrumentId:
        gain = gains.gain_for(iid)
        est = _rms_dbfs(bank.buffers[iid]) if gain > 0.0 else -math.inf
        if math.isfinite(est):
            est += 20.0 * math.log10(gain * cfg.master_gain)
        print(f"  {iid.value:<9s} gain {gain:6.3f}   est rms {_fmt_dbfs(est)}")
    return EXIT_OK


def _cmd_stems(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    bank = generate_stems(cfg.seed, sample_rate_hz=cfg.sample_rate_hz, bpm=cfg.bpm)
    export_stems(bank, args.out_dir)
    print(f"exported {len(bank.buffers)} stems + {MANIFEST_NAME} to {args.out_dir}")
    print(f"  seed {bank.seed}, {bank.sample_rate_hz} Hz, {bank.bpm:g} bpm, "
          f"{bank.loop_len_samples} samples/loop ({bank.loop_duration_s:.3f} s)")
    return EXIT_OK


def _collect_wavs(paths: list[Path]) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            found = sorted(p for p in path.iterdir() if p.suffix.lower() == ".wav")
            if not found:
                raise FileNotFoundError(f"no .wav files in directory {path}")
            files.extend(found)
        else:
            files.append(path)
    return files


def _cmd_analyze(args: argparse.Namespace) -> int:
    files = _collect_wavs(args.paths)
    failures = 0
    for path in files:
        try:
            audio, rate = read_wav(path)
            fraction = verify_band(audio, rate)
        except DomainError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_IO
        peak = float(np.max(np.abs(audio)))
        print(f"{path.name:<14s} in-band {fraction:.6f}   "
              f"rms {_fmt_dbfs(_rms_dbfs(audio))}   peak {peak:.4f}")
        if fraction < BAND_MIN_FRACTION:
            failures += 1
    if failures:
        print(f"{failures} file(s) below the {BAND_MIN_FRACTION:.2f} band "
              f"fraction", file=sys.stderr)
        return EXIT_CONSTRAINT
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import ServiceSettings, create_app

    cfg = _resolve_config(args)
    settings = ServiceSettings(config=cfg, stems_dir=args.stems_dir, ui_dir=args.ui)
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "render": _cmd_render,
        "stems": _cmd_stems,
        "analyze": _cmd_analyze,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except TrajectoryFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
