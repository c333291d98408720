"""Accelerometer-to-tilt conversion and smoothing for the live control path.

Gravity direction gives pitch/roll by plain trigonometry; samples whose
magnitude falls outside a plausibility band (shake, freefall) are rejected
so the previous tilt stays in effect. A light exponential moving average
suppresses hand tremor without masking the 1-degree gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from tiltmix.errors import ConfigurationError, SampleRejected
from tiltmix.gainmap import TiltAngles, _clamp_angle

ACCEPT_MIN_G = 0.3
ACCEPT_MAX_G = 3.0
DEFAULT_ALPHA = 0.25


@dataclass(frozen=True)
class AccelSample:
    """One accelerometer reading in g-units.

    Axes: x points right, y toward the top of the screen, z out of the
    screen; a device flat on its back reads (0, 0, +1).
    """

    ax: float
    ay: float
    az: float
    timestamp_s: float = 0.0


def accel_to_tilt(s: AccelSample) -> TiltAngles:
    """Convert one accelerometer sample to tilt angles in degrees.

    pitch = atan2(-ay, hypot(ax, az)): top of device tipped away => positive.
    roll  = atan2(ax, az): right edge down => positive, clamped to [-90, 90].

    Raises:
        SampleRejected: magnitude outside [0.3, 3.0] g (shake or freefall),
            or any non-finite component.
    """
    mag = math.sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az) \
        if all(map(math.isfinite, (s.ax, s.ay, s.az))) else math.nan
    if not ACCEPT_MIN_G <= mag <= ACCEPT_MAX_G:
        raise SampleRejected(
            f"accel magnitude {mag:.3g} g outside [{ACCEPT_MIN_G}, {ACCEPT_MAX_G}]")
    pitch = math.degrees(math.atan2(-s.ay, math.hypot(s.ax, s.az)))
    roll = math.degrees(math.atan2(s.ax, s.az))
    return TiltAngles(_clamp_angle(pitch), _clamp_angle(roll))


@dataclass
class SmootherState:
    """Per-axis EMA state; single-owner mutable, one producer per session."""

    alpha: float = DEFAULT_ALPHA
    ema_pitch: float = 0.0
    ema_roll: float = 0.0
    initialized: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must be in (0, 1], got {self.alpha}")


def smooth(state: SmootherState, raw: TiltAngles) -> TiltAngles:
    """Fold one raw tilt into the EMA and return the smoothed tilt.

    The first sample initializes the average; output stays in [-90, 90].
    """
    t = raw.clamped()
    if not state.initialized:
        state.ema_pitch = t.pitch_deg
        state.ema_roll = t.roll_deg
        state.initialized = True
    else:
        a = state.alpha
        state.ema_pitch = a * t.pitch_deg + (1.0 - a) * state.ema_pitch
        state.ema_roll = a * t.roll_deg + (1.0 - a) * state.ema_roll
    return TiltAngles(_clamp_angle(state.ema_pitch), _clamp_angle(state.ema_roll))
