"""WebSocket control service and stem file server.

The service speaks newline-free JSON text frames over a WebSocket: clients
send ``tilt``, ``accel`` or ``config-get`` messages and receive ``gains``,
``config`` or ``error`` replies.  Stem audio and the stem manifest are served
over plain HTTP GET so clients can cache loop buffers up front.
"""

from .app import ServiceSettings, create_app, ensure_stems
from .models import (
    AccelMessage,
    ConfigGetMessage,
    ConfigMessage,
    ErrorMessage,
    GainsMessage,
    TiltMessage,
    parse_client_message,
)
from .sessions import Session, SessionRegistry

__all__ = [
    "AccelMessage",
    "ConfigGetMessage",
    "ConfigMessage",
    "ErrorMessage",
    "GainsMessage",
    "ServiceSettings",
    "Session",
    "SessionRegistry",
    "TiltMessage",
    "create_app",
    "ensure_stems",
    "parse_client_message",
]
