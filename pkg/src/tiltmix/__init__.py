"""Tilt-controlled five-stem loop mixer.

The package turns device tilt (pitch/roll) into per-instrument gain factors
over a short procedurally generated music loop: four instruments fade with
tilt direction, a fifth is gated on only when the device sits level.
"""

from tiltmix.errors import (
    ConfigurationError,
    DomainError,
    NotReady,
    SampleRejected,
    TiltmixError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "NotReady",
    "SampleRejected",
    "TiltmixError",
    "__version__",
]
