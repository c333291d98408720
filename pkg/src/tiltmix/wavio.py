"""Minimal RIFF/WAVE I/O: mono, 32-bit float PCM (format tag 3).

The layout is the canonical 44-byte preamble (RIFF size header, 16-byte fmt
chunk, data chunk header) followed by raw little-endian float32 samples, so
files are bit-exact and golden-testable. Writes go through a temp file and
an atomic rename.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from tiltmix.errors import DomainError

WAVE_FORMAT_IEEE_FLOAT = 0x0003
PREAMBLE_BYTES = 44  # RIFF(12) + fmt header(8) + fmt body(16) + data header(8)


def write_wav(buffer: np.ndarray, sample_rate_hz: int, path: str | Path) -> None:
    """Write a mono float32 WAV file atomically.

    Raises:
        DomainError: empty or non-1-D buffer, or samples outside [-1, 1].
        OSError: unwritable destination.
    """
    x = np.asarray(buffer)
    if x.ndim != 1:
        raise DomainError(f"mono contract: buffer must be 1-D, got shape {x.shape}")
    if x.size == 0:
        raise DomainError("refusing to write an empty buffer")
    if not np.all(np.isfinite(x)):
        raise DomainError("buffer contains non-finite samples")
    if float(np.max(np.abs(x))) > 1.0:
        raise DomainError("buffer samples must lie within [-1, 1]")
    data = np.ascontiguousarray(x, dtype="<f4").tobytes()

    byte_rate = sample_rate_hz * 4
    header = b"".join([
        b"RIFF",
        struct.pack("<I", 36 + len(data)),
        b"WAVE",
        b"fmt ",
        struct.pack("<IHHIIHH", 16, WAVE_FORMAT_IEEE_FLOAT, 1,
                    sample_rate_hz, byte_rate, 4, 32),
        b"data",
        struct.pack("<I", len(data)),
    ])

    path = Path(path)
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
    try:
        with open(tmp, "wb") as fh:
            fh.write(header)
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a mono float32 WAV file; returns (samples, sample_rate_hz).

    Accepts fmt chunks of 16 or 18 bytes as long as the stream is mono
    IEEE-float 32-bit; other layouts are rejected.

    Raises:
        DomainError: not a RIFF/WAVE file or unsupported stream format.
        OSError: unreadable path.
    """
    raw = Path(path).read_bytes()
    if len(raw) < PREAMBLE_BYTES or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise DomainError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt: tuple[int, int, int, int] | None = None
    data: bytes | None = None
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + size]
        if chunk_id == b"fmt " and size >= 16:
            tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body)
            fmt = (tag, channels, rate, bits)
        elif chunk_id == b"data":
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise DomainError(f"{path}: missing fmt or data chunk")
    tag, channels, rate, bits = fmt
    if tag != WAVE_FORMAT_IEEE_FLOAT or channels != 1 or bits != 32:
        raise DomainError(
            f"{path}: unsupported stream (tag={tag}, channels={channels}, "
            f"bits={bits}); need mono float32")
    samples = np.frombuffer(data, dtype="<f4").copy()
    return samples, rate
