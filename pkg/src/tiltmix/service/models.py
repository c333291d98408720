"""Wire-protocol message models.

Every frame on the control socket is a single JSON object with a ``type``
discriminator.  Client frames are ``tilt`` (smoothed orientation in degrees),
``accel`` (raw accelerometer vector in g) and ``config-get``.  Server frames
are ``gains`` (one float per instrument plus the gate flag and a sequence
number), ``config`` (the flat runtime configuration) and ``error``.

Parsing is strict about shape (unknown ``type`` values and missing fields are
rejected) but tolerant of extra fields, so clients may attach metadata such as
timestamps without breaking older servers.  Non-finite floats survive parsing
deliberately: the session layer rejects them with an ``error`` frame instead
of tearing down the connection.
"""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

if TYPE_CHECKING:
    from ..config import AppConfig


class _Message(BaseModel):
    model_config = ConfigDict(frozen=True)


class TiltMessage(_Message):
    type: Literal["tilt"]
    pitch_deg: float
    roll_deg: float


class AccelMessage(_Message):
    type: Literal["accel"]
    ax: float
    ay: float
    az: float


class ConfigGetMessage(_Message):
    type: Literal["config-get"]


ClientMessage = Annotated[
    Union[TiltMessage, AccelMessage, ConfigGetMessage],
    Field(discriminator="type"),
]

_CLIENT_ADAPTER: TypeAdapter = TypeAdapter(ClientMessage)


def parse_client_message(text: str | bytes) -> TiltMessage | AccelMessage | ConfigGetMessage:
    """Parse one client frame; raises ``pydantic.ValidationError`` if invalid."""
    return _CLIENT_ADAPTER.validate_json(text)


class GainsMessage(_Message):
    type: Literal["gains"] = "gains"
    piano: float
    keyboard: float
    guitar: float
    drums: float
    synth: float
    gate_on: bool
    seq: int


class ConfigMessage(_Message):
    type: Literal["config"] = "config"
    mute_angle_deg: float
    plateau_half_width_deg: float
    plateau_gain: float
    max_gain: float
    threshold_deg: float
    hysteresis_deg: float
    on_gain: float
    alpha: float
    master_gain: float
    ramp_ms: float
    control_rate_hz: float
    sample_rate_hz: int
    bpm: float
    seed: int
    session_timeout_s: float

    @classmethod
    def from_config(cls, config: "AppConfig") -> "ConfigMessage":
        return cls(**dataclasses.asdict(config))


class ErrorMessage(_Message):
    type: Literal["error"] = "error"
    code: str
    text: str


ServerMessage = Union[GainsMessage, ConfigMessage, ErrorMessage]
