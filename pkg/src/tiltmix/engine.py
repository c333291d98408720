"""Sample-accurate loop playback: ramped per-track gains, mono sum, limiter.

The mixer owns a loop transport over the five stems and one linear gain
ramp per track. Control input arrives as whole gain vectors (set_gains) and
takes effect from the next rendered sample; renders are bit-deterministic
functions of their inputs. Offline use goes through render_trajectory,
which replays a tilt trajectory through the gain mapping at a fixed control
rate.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tiltmix.config import AppConfig, control_config
from tiltmix.errors import DomainError, NotReady, TrajectoryFormatError
from tiltmix.gainmap import GainVector, InstrumentId, TiltAngles, compute_gains
from tiltmix.stems import StemBank
from tiltmix.wavio import read_wav, write_wav  # re-exported engine surface

__all__ = [
    "LIMIT_CEILING",
    "LIMIT_KNEE",
    "LoopMixer",
    "RampState",
    "Transport",
    "limit",
    "load_trajectory_csv",
    "read_wav",
    "render_trajectory",
    "write_wav",
]

TRACK_ORDER = tuple(InstrumentId)

DEFAULT_MASTER_GAIN = 0.25
DEFAULT_RAMP_MS = 20.0
DEFAULT_CONTROL_RATE_HZ = 100.0

LIMIT_KNEE = 0.9
LIMIT_CEILING = 0.99
_LIMIT_SPAN = 3.0 * (LIMIT_CEILING - LIMIT_KNEE)  # cubic ease width above knee


@dataclass
class Transport:
    """Loop playback position; advancing wraps modulo the loop length."""

    loop_len_samples: int
    position_samples: int = 0

    def __post_init__(self) -> None:
        if self.loop_len_samples < 1:
            raise DomainError(
                f"loop_len_samples must be >= 1, got {self.loop_len_samples}")
        self.position_samples %= self.loop_len_samples

    def advance(self, n_samples: int) -> int:
        self.position_samples = (self.position_samples + n_samples) % self.loop_len_samples
        return self.position_samples


@dataclass
class RampState:
    """Per-track linear gain ramp.

    A new target restarts the ramp from the current gain and lands on the
    target after exactly ramp_samples samples (float drift is squashed by
    pinning the final ramp sample).
    """

    current_gain: float = 0.0
    target_gain: float = 0.0
    ramp_samples: int = 960
    remaining: int = field(default=0, repr=False)
    _step: float = field(default=0.0, repr=False)

    def __post_init__(self) -> None:
        if self.ramp_samples < 1:
            raise DomainError(f"ramp_samples must be >= 1, got {self.ramp_samples}")

    def set_target(self, target: float) -> None:
        target = float(target)
        self.target_gain = target
        if target == self.current_gain:
            self.remaining = 0
            self._step = 0.0
            return
        self._step = (target - self.current_gain) / self.ramp_samples
        self.remaining = self.ramp_samples

    def advance(self, n_samples: int) -> np.ndarray:
        """Return the next n per-sample gains and consume them."""
        out = np.full(n_samples, self.target_gain)
        m = min(self.remaining, n_samples)
        if m:
            seg = self.current_gain + self._step * np.arange(1, m + 1)
            if self.remaining <= n_samples:
                seg[-1] = self.target_gain  # exact arrival
            out[:m] = seg
            self.current_gain = float(out[m - 1])
            self.remaining -= m
        return out


def limit(x):
    """Memoryless limiter: identity for |x| <= 0.9, then a cubic ease whose
    slope runs 1 -> 0, flattening at the 0.99 ceiling. Output is strictly
    inside (-1, 1) for any finite input. Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=np.float64)
    a = np.abs(arr)
    t = np.minimum(np.maximum(a - LIMIT_KNEE, 0.0), _LIMIT_SPAN)
    eased = LIMIT_KNEE + t - t * t / _LIMIT_SPAN + t ** 3 / (3.0 * _LIMIT_SPAN ** 2)
    y = np.where(a <= LIMIT_KNEE, arr, np.copysign(eased, arr))
    return float(y) if np.isscalar(x) else y


class LoopMixer:
    """Five-track loop mixer; single-owner render state."""

    def __init__(self, bank: StemBank | None = None, *,
                 master_gain: float = DEFAULT_MASTER_GAIN,
                 ramp_ms: float = DEFAULT_RAMP_MS):
        if master_gain <= 0.0:
            raise DomainError(f"master_gain must be > 0, got {master_gain}")
        if ramp_ms < 0.0:
            raise DomainError(f"ramp_ms must be >= 0, got {ramp_ms}")
        self.master_gain = master_gain
        self.ramp_ms = ramp_ms
        self._stack: np.ndarray | None = None
        self._ramps: list[RampState] = []
        self.transport: Transport | None = None
        self.sample_rate_hz: int | None = None
        if bank is not None:
            self.load_bank(bank)

    def load_bank(self, bank: StemBank) -> None:
        self._stack = np.stack(
            [np.asarray(bank.buffers[iid], dtype=np.float64) for iid in TRACK_ORDER])
        self.sample_rate_hz = bank.sample_rate_hz
        self.transport = Transport(loop_len_samples=self._stack.shape[1])
        ramp_samples = max(1, round(self.ramp_ms / 1000.0 * bank.sample_rate_hz))
        self._ramps = [RampState(ramp_samples=ramp_samples) for _ in TRACK_ORDER]

    def _require_bank(self) -> None:
        if self._stack is None:
            raise NotReady("no stem bank loaded")

    def set_gains(self, gv: GainVector) -> None:
        """Set the five ramp targets; effective from the next sample."""
        self._require_bank()
        for ramp, iid in zip(self._ramps, TRACK_ORDER):
            ramp.set_target(gv.gain_for(iid))

    def render_block(self, n_samples: int) -> np.ndarray:
        """Render n samples of the mono mix and advance the transport."""
        self._require_bank()
        if n_samples < 1:
            raise DomainError(f"n_samples must be >= 1, got {n_samples}")
        assert self._stack is not None and self.transport is not None
        pos = self.transport.position_samples
        loop_len = self.transport.loop_len_samples
        if pos + n_samples <= loop_len:
            seg = self._stack[:, pos:pos + n_samples]
        else:
            idx = (pos + np.arange(n_samples)) % loop_len
            seg = self._stack[:, idx]
        gains = np.vstack([ramp.advance(n_samples) for ramp in self._ramps])
        out = (seg * gains).sum(axis=0) * self.master_gain
        self.transport.advance(n_samples)
        return limit(out)


# ---------------------------------------------------------------------------
# Offline trajectory rendering.

def _validate_trajectory(trajectory) -> list[tuple[float, float, float]]:
    pts = [(float(t), float(p), float(r)) for t, p, r in trajectory]
    if not pts:
        raise DomainError("trajectory must be non-empty")
    if pts[0][0] != 0.0:
        raise DomainError(f"trajectory must start at time 0, got {pts[0][0]}")
    for (t0, _, _), (t1, _, _) in zip(pts, pts[1:]):
        if not t1 > t0:
            raise DomainError("trajectory times must be strictly increasing")
    for t, p, r in pts:
        if not np.isfinite([t, p, r]).all():
            raise DomainError("trajectory values must be finite")
    return pts


def _tilt_at(pts: list[tuple[float, float, float]], times: list[float],
             t: float) -> TiltAngles:
    """Piecewise-linear interpolation; hold after the last point."""
    if t >= times[-1]:
        _, p, r = pts[-1]
        return TiltAngles(p, r)
    i = max(bisect_right(times, t) - 1, 0)
    t0, p0, r0 = pts[i]
    t1, p1, r1 = pts[i + 1]
    f = (t - t0) / (t1 - t0)
    return TiltAngles(p0 + f * (p1 - p0), r0 + f * (r1 - r0))


def _render_extent(pts: list[tuple[float, float, float]],
                   duration_s: float | None, sample_rate_hz: int) -> int:
    """Total sample count for a trajectory render, validating the duration."""
    last_time = pts[-1][0]
    if duration_s is None:
        duration_s = last_time
    if duration_s < last_time:
        raise DomainError(
            f"duration_s ({duration_s}) shorter than trajectory end ({last_time})")
    n_total = round(duration_s * sample_rate_hz)
    if n_total < 1:
        raise DomainError("render would be empty; give a positive duration")
    return n_total


def _control_schedule(pts: list[tuple[float, float, float]], cfg: AppConfig,
                      n_total: int, sample_rate_hz: int):
    """Yield (start, length, gains, gate_on) control blocks covering n_total.

    One gain update per control tick; tilt is sampled at each block's start
    time and the gate latch carries forward from block to block (starting
    released).
    """
    control = control_config(cfg)
    block = max(1, round(sample_rate_hz / cfg.control_rate_hz))
    times = [p[0] for p in pts]
    gate_on = False
    pos = 0
    while pos < n_total:
        tilt = _tilt_at(pts, times, pos / sample_rate_hz)
        gains, gate_on = compute_gains(tilt, control, gate_on)
        n = min(block, n_total - pos)
        yield pos, n, gains, gate_on
        pos += n


def render_trajectory(bank: StemBank, trajectory, config: AppConfig | None = None,
                      duration_s: float | None = None) -> np.ndarray:
    """Render a tilt trajectory to a mono buffer, bit-deterministically.

    Tilt is interpolated piecewise-linearly between trajectory points (held
    after the last), mapped to gains at the configured control rate, and
    applied through the mixer's ramps. duration_s defaults to the last
    trajectory time and must not be shorter than it.

    Raises:
        DomainError: invalid trajectory or duration.
    """
    cfg = config if config is not None else AppConfig()
    pts = _validate_trajectory(trajectory)
    sr = bank.sample_rate_hz
    n_total = _render_extent(pts, duration_s, sr)

    mixer = LoopMixer(bank, master_gain=cfg.master_gain, ramp_ms=cfg.ramp_ms)
    out = np.empty(n_total)
    for pos, n, gains, _ in _control_schedule(pts, cfg, n_total, sr):
        mixer.set_gains(gains)
        out[pos:pos + n] = mixer.render_block(n)
    return out


def trajectory_final_gains(trajectory, config: AppConfig | None = None,
                           duration_s: float | None = None, *,
                           sample_rate_hz: int) -> tuple[GainVector, bool]:
    """Gain vector and gate state in force at the end of a trajectory render.

    Replays the same control schedule as render_trajectory (same block
    boundaries, same gate evolution) without producing audio; useful for
    summarising what a render converged to.

    Raises:
        DomainError: invalid trajectory or duration.
    """
    cfg = config if config is not None else AppConfig()
    pts = _validate_trajectory(trajectory)
    n_total = _render_extent(pts, duration_s, sample_rate_hz)
    gains: GainVector | None = None
    gate_on = False
    for _, _, gains, gate_on in _control_schedule(pts, cfg, n_total, sample_rate_hz):
        pass
    assert gains is not None  # n_total >= 1 guarantees at least one block
    return gains, gate_on


# ---------------------------------------------------------------------------
# Trajectory CSV.

TRAJECTORY_HEADER = "time_s,pitch_deg,roll_deg"


def load_trajectory_csv(path: str | Path) -> list[tuple[float, float, float]]:
    """Parse a trajectory CSV (header `time_s,pitch_deg,roll_deg`).

    Raises:
        TrajectoryFormatError: malformed content; carries the line number.
        OSError: unreadable path.
    """
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != TRAJECTORY_HEADER:
        raise TrajectoryFormatError(
            f"{path}: line 1: expected header {TRAJECTORY_HEADER!r}", line=1)
    pts: list[tuple[float, float, float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise TrajectoryFormatError(
                f"{path}: line {lineno}: expected 3 comma-separated values, "
                f"got {line!r}", line=lineno)
        try:
            t, p, r = (float(v) for v in parts)
        except ValueError:
            raise TrajectoryFormatError(
                f"{path}: line {lineno}: non-numeric value in {line!r}",
                line=lineno) from None
        if pts and t <= pts[-1][0]:
            raise TrajectoryFormatError(
                f"{path}: line {lineno}: time {t} not strictly increasing",
                line=lineno)
        if not pts and t != 0.0:
            raise TrajectoryFormatError(
                f"{path}: line {lineno}: first time must be 0, got {t}",
                line=lineno)
        pts.append((t, p, r))
    if not pts:
        raise TrajectoryFormatError(f"{path}: no trajectory rows", line=max(2, len(lines)))
    return pts
