"""Per-connection control state and the registry that expires idle sessions.

A :class:`Session` owns everything that makes replies stateful: the tilt
smoother, the gate latch and the reply sequence number.  Message handling is
synchronous and deterministic — replaying the same frames into a fresh
session yields identical replies — which keeps the transport layer a thin
shell around it.
"""

from __future__ import annotations

import secrets
import time

from ..config import AppConfig, control_config
from ..errors import DomainError, SampleRejected
from ..gainmap import TiltAngles, compute_gains
from ..orientation import AccelSample, SmootherState, accel_to_tilt, smooth
from .models import (
    AccelMessage,
    ConfigGetMessage,
    ConfigMessage,
    ErrorMessage,
    GainsMessage,
    ServerMessage,
    TiltMessage,
)

ClientMessage = TiltMessage | AccelMessage | ConfigGetMessage


class Session:
    """One client's smoother, gate latch and reply counter."""

    def __init__(self, session_id: str, config: AppConfig, now: float) -> None:
        self.id = session_id
        self.config = config
        self.control = control_config(config)
        self.smoother = SmootherState(alpha=config.alpha)
        self.gate_on = False
        self.seq = 0
        self.created_at = now
        self.last_activity = now

    def handle(self, message: ClientMessage, now: float | None = None) -> ServerMessage:
        """Apply one client frame and return the reply frame.

        ``seq`` advances only for accepted tilt/accel frames; error replies
        and config reads leave all session state untouched.
        """
        self.last_activity = time.monotonic() if now is None else now
        if isinstance(message, TiltMessage):
            raw = TiltAngles(pitch_deg=message.pitch_deg, roll_deg=message.roll_deg)
            return self._apply_tilt(raw)
        if isinstance(message, AccelMessage):
            sample = AccelSample(ax=message.ax, ay=message.ay, az=message.az)
            try:
                raw = accel_to_tilt(sample)
            except SampleRejected as exc:
                return ErrorMessage(code="sample_rejected", text=str(exc))
            return self._apply_tilt(raw)
        if isinstance(message, ConfigGetMessage):
            return ConfigMessage.from_config(self.config)
        raise TypeError(f"unsupported message type: {type(message).__name__}")

    def _apply_tilt(self, raw: TiltAngles) -> ServerMessage:
        try:
            smoothed = smooth(self.smoother, raw)
        except DomainError as exc:
            return ErrorMessage(code="invalid_tilt", text=str(exc))
        gains, self.gate_on = compute_gains(smoothed, self.control, was_on=self.gate_on)
        self.seq += 1
        return GainsMessage(
            piano=gains.piano,
            keyboard=gains.keyboard,
            guitar=gains.guitar,
            drums=gains.drums,
            synth=gains.synth,
            gate_on=self.gate_on,
            seq=self.seq,
        )


class SessionRegistry:
    """Creates sessions, looks them up and removes the ones gone idle."""

    def __init__(self, config: AppConfig) -> None:
        self.config = config
        self._sessions: dict[str, Session] = {}

    def create(self, now: float | None = None) -> Session:
        stamp = time.monotonic() if now is None else now
        while True:
            session_id = secrets.token_hex(8)
            if session_id not in self._sessions:
                break
        session = Session(session_id, self.config, stamp)
        self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def remove(self, session_id: str) -> None:
        self._sessions.pop(session_id, None)

    def expire_idle(self, now: float) -> list[Session]:
        """Remove and return sessions idle for longer than the timeout.

        A session idle for exactly the timeout is kept; expiry requires
        strictly exceeding it.
        """
        timeout = self.config.session_timeout_s
        expired = [s for s in self._sessions.values() if now - s.last_activity > timeout]
        for session in expired:
            del self._sessions[session.id]
        return expired

    def __len__(self) -> int:
        return len(self._sessions)
