"""Pure mapping from tilt angles to the five instrument gain factors.

Four instruments fade along piecewise-linear gain envelopes of the tilt
angle (piano/keyboard on roll, drums/guitar on pitch, one of each pair per
direction); the fifth (synth) is a gated extra that only sounds while the
device sits inside a small square around level. Everything here is pure
math on scalars: no audio, no time, no state beyond the explicit gate flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from tiltmix.errors import ConfigurationError, DomainError

ANGLE_LIMIT_DEG = 90.0


class Axis(str, Enum):
    PITCH = "pitch"
    ROLL = "roll"


class InstrumentId(str, Enum):
    PIANO = "piano"
    KEYBOARD = "keyboard"
    GUITAR = "guitar"
    DRUMS = "drums"
    SYNTH = "synth"


def _clamp_angle(value: float) -> float:
    return min(max(value, -ANGLE_LIMIT_DEG), ANGLE_LIMIT_DEG)


@dataclass(frozen=True)
class TiltAngles:
    """Device tilt in degrees: pitch toward(-)/away(+), roll left(-)/right(+)."""

    pitch_deg: float
    roll_deg: float

    def clamped(self) -> "TiltAngles":
        """Return a copy with both angles folded into [-90, +90].

        Raises:
            DomainError: if either angle is NaN or infinite.
        """
        if not (math.isfinite(self.pitch_deg) and math.isfinite(self.roll_deg)):
            raise DomainError(f"tilt angles must be finite, got {self}")
        return TiltAngles(_clamp_angle(self.pitch_deg), _clamp_angle(self.roll_deg))

    def axis_value(self, axis: Axis) -> float:
        return self.pitch_deg if axis is Axis.PITCH else self.roll_deg


@dataclass(frozen=True)
class GainEnvelope:
    """Piecewise-linear gain curve in the instrument's favored-direction
    coordinate (angle * orientation), with breakpoints
    (mute_angle, 0) -> (-half_width, plateau) -> (+half_width, plateau) -> (+90, max).
    """

    orientation: int
    axis: Axis
    mute_angle_deg: float = -90.0
    plateau_half_width_deg: float = 5.0
    plateau_gain: float = 1.0
    max_gain: float = 2.0

    def __post_init__(self) -> None:
        if self.orientation not in (+1, -1):
            raise ConfigurationError(
                f"orientation must be +1 or -1, got {self.orientation}")
        if not 0.0 < self.plateau_half_width_deg < ANGLE_LIMIT_DEG:
            raise ConfigurationError(
                "plateau_half_width_deg must lie in (0, 90), got "
                f"{self.plateau_half_width_deg}")
        if not 0.0 <= self.plateau_gain <= self.max_gain:
            raise ConfigurationError(
                "need 0 <= plateau_gain <= max_gain, got "
                f"{self.plateau_gain} / {self.max_gain}")
        if not -ANGLE_LIMIT_DEG <= self.mute_angle_deg < -self.plateau_half_width_deg:
            raise ConfigurationError(
                "mute_angle_deg must lie in [-90, -plateau_half_width), got "
                f"{self.mute_angle_deg}")


@dataclass(frozen=True)
class GateConfig:
    """Synth gate square: on within +/-threshold on both axes, with an
    extra hysteresis margin while already on (release side only)."""

    threshold_deg: float = 1.0
    hysteresis_deg: float = 0.2
    on_gain: float = 1.0

    def __post_init__(self) -> None:
        if not self.threshold_deg > 0.0:
            raise ConfigurationError(
                f"threshold_deg must be > 0, got {self.threshold_deg}")
        if self.hysteresis_deg < 0.0:
            raise ConfigurationError(
                f"hysteresis_deg must be >= 0, got {self.hysteresis_deg}")
        if self.on_gain < 0.0:
            raise ConfigurationError(
                f"on_gain must be >= 0, got {self.on_gain}")


@dataclass(frozen=True)
class GainVector:
    """Instantaneous linear gain per instrument."""

    piano: float
    keyboard: float
    guitar: float
    drums: float
    synth: float

    def as_dict(self) -> dict[str, float]:
        return {
            "piano": self.piano,
            "keyboard": self.keyboard,
            "guitar": self.guitar,
            "drums": self.drums,
            "synth": self.synth,
        }

    def gain_for(self, instrument: InstrumentId) -> float:
        return self.as_dict()[instrument.value]


@dataclass(frozen=True)
class ControlConfig:
    """Full envelope + gate configuration consumed by compute_gains."""

    piano: GainEnvelope
    keyboard: GainEnvelope
    guitar: GainEnvelope
    drums: GainEnvelope
    gate: GateConfig

    @staticmethod
    def default(
        *,
        mute_angle_deg: float = -90.0,
        plateau_half_width_deg: float = 5.0,
        plateau_gain: float = 1.0,
        max_gain: float = 2.0,
        threshold_deg: float = 1.0,
        hysteresis_deg: float = 0.2,
        on_gain: float = 1.0,
    ) -> "ControlConfig":
        """Build the standard instrument wiring: piano favors right roll,
        keyboard left roll, drums away-pitch, guitar toward-pitch; all four
        share one envelope parameter set (mirror-symmetric pairs)."""
        def env(orientation: int, axis: Axis) -> GainEnvelope:
            return GainEnvelope(
                orientation=orientation,
                axis=axis,
                mute_angle_deg=mute_angle_deg,
                plateau_half_width_deg=plateau_half_width_deg,
                plateau_gain=plateau_gain,
                max_gain=max_gain,
            )

        return ControlConfig(
            piano=env(+1, Axis.ROLL),
            keyboard=env(-1, Axis.ROLL),
            drums=env(+1, Axis.PITCH),
            guitar=env(-1, Axis.PITCH),
            gate=GateConfig(
                threshold_deg=threshold_deg,
                hysteresis_deg=hysteresis_deg,
                on_gain=on_gain,
            ),
        )


def axis_gain(angle_deg: float, env: GainEnvelope) -> float:
    """Evaluate the gain envelope at one tilt angle.

    The angle is flipped into the favored-direction coordinate and clamped
    to [-90, +90]; breakpoint values are returned exactly.

    Raises:
        DomainError: if angle_deg is NaN or infinite.
    """
    if not math.isfinite(angle_deg):
        raise DomainError(f"angle must be finite, got {angle_deg}")
    a = _clamp_angle(angle_deg * env.orientation)
    mute = env.mute_angle_deg
    half = env.plateau_half_width_deg
    if a <= mute:
        return 0.0
    if a < -half:
        return (a - mute) * env.plateau_gain / (-half - mute)
    if a <= half:
        return env.plateau_gain
    if a < ANGLE_LIMIT_DEG:
        slope = (env.max_gain - env.plateau_gain) / (ANGLE_LIMIT_DEG - half)
        return env.plateau_gain + (a - half) * slope
    return env.max_gain


def synth_gate(tilt: TiltAngles, cfg: GateConfig, was_on: bool) -> bool:
    """Decide the synth gate: a closed square of side 2*threshold around
    level, widened by the hysteresis margin while the gate is already on."""
    t = tilt.clamped()
    limit = cfg.threshold_deg + (cfg.hysteresis_deg if was_on else 0.0)
    return abs(t.pitch_deg) <= limit and abs(t.roll_deg) <= limit


def compute_gains(
    tilt: TiltAngles, config: ControlConfig, was_on: bool
) -> tuple[GainVector, bool]:
    """Map one tilt reading to the five instrument gains plus gate state."""
    t = tilt.clamped()
    gate_on = synth_gate(t, config.gate, was_on)
    gv = GainVector(
        piano=axis_gain(t.axis_value(config.piano.axis), config.piano),
        keyboard=axis_gain(t.axis_value(config.keyboard.axis), config.keyboard),
        guitar=axis_gain(t.axis_value(config.guitar.axis), config.guitar),
        drums=axis_gain(t.axis_value(config.drums.axis), config.drums),
        synth=config.gate.on_gain if gate_on else 0.0,
    )
    return gv, gate_on
