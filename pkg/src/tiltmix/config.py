"""Flat key-value configuration shared by the library, service, and CLI.

The file format is deliberately plain: one `key = value` per line, `#`
comments, keys named exactly after the fields below. A missing file loads
the defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from tiltmix.errors import ConfigurationError
from tiltmix.gainmap import ControlConfig
from tiltmix.orientation import SmootherState


@dataclass(frozen=True)
class AppConfig:
    # Envelope (shared by the four continuous instruments; mirrored pairs).
    mute_angle_deg: float = -90.0
    plateau_half_width_deg: float = 5.0
    plateau_gain: float = 1.0
    max_gain: float = 2.0
    # Synth gate.
    threshold_deg: float = 1.0
    hysteresis_deg: float = 0.2
    on_gain: float = 1.0
    # Tilt smoothing.
    alpha: float = 0.25
    # Engine.
    master_gain: float = 0.25
    ramp_ms: float = 20.0
    control_rate_hz: float = 100.0
    # Stems.
    sample_rate_hz: int = 48000
    bpm: float = 120.0
    seed: int = 42
    # Service.
    session_timeout_s: float = 300.0


_INT_FIELDS = {"sample_rate_hz", "seed"}


def control_config(cfg: AppConfig) -> ControlConfig:
    """Build the envelope/gate wiring from the flat config."""
    return ControlConfig.default(
        mute_angle_deg=cfg.mute_angle_deg,
        plateau_half_width_deg=cfg.plateau_half_width_deg,
        plateau_gain=cfg.plateau_gain,
        max_gain=cfg.max_gain,
        threshold_deg=cfg.threshold_deg,
        hysteresis_deg=cfg.hysteresis_deg,
        on_gain=cfg.on_gain,
    )


def validate_config(cfg: AppConfig) -> AppConfig:
    """Check cross-field constraints; returns the config for chaining.

    Raises:
        ConfigurationError: any value outside its documented range.
    """
    control_config(cfg)  # envelope/gate ranges
    SmootherState(alpha=cfg.alpha)  # alpha range
    if cfg.master_gain <= 0.0:
        raise ConfigurationError(f"master_gain must be > 0, got {cfg.master_gain}")
    if cfg.ramp_ms < 0.0:
        raise ConfigurationError(f"ramp_ms must be >= 0, got {cfg.ramp_ms}")
    if cfg.control_rate_hz <= 0.0:
        raise ConfigurationError(
            f"control_rate_hz must be > 0, got {cfg.control_rate_hz}")
    if cfg.session_timeout_s <= 0.0:
        raise ConfigurationError(
            f"session_timeout_s must be > 0, got {cfg.session_timeout_s}")
    return cfg


def load_config(path: str | Path | None) -> AppConfig:
    """Load a config file, or the defaults when path is None or absent.

    Raises:
        ConfigurationError: malformed lines, unknown keys, or bad values.
    """
    if path is None:
        return validate_config(AppConfig())
    path = Path(path)
    if not path.exists():
        return validate_config(AppConfig())
    known = {f.name: f for f in fields(AppConfig)}
    values: dict[str, float | int] = {}
    for lineno, rawline in enumerate(path.read_text().splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{path}: line {lineno}: expected 'key = value', got {rawline!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in known:
            raise ConfigurationError(f"{path}: line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(raw) if key in _INT_FIELDS else float(raw)
        except ValueError as exc:
            raise ConfigurationError(
                f"{path}: line {lineno}: bad value for {key}: {raw!r}") from exc
    return validate_config(AppConfig(**values))


def dump_config(cfg: AppConfig) -> str:
    """Serialize a config to the flat key-value text format."""
    lines = [f"{f.name} = {getattr(cfg, f.name)!r}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"
