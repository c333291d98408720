"""Deterministic procedural generation of the five loop stems.

One 16-beat loop, five mono voices: piano and keyboard share one melody
(different timbres), guitar plays a plucked riff, drums are noise bursts
plus tom tones kept at or above 200 Hz, and a bright wobbling pulse synth
provides the gated reward channel. Every stem is finished with a circular
FFT band shaper (which both enforces the spectral window and preserves the
loop seam) and normalized to a common RMS so equal gains mean equal level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tiltmix.errors import ConfigurationError, DomainError
from tiltmix.gainmap import InstrumentId
from tiltmix.wavio import write_wav, read_wav

BEATS_PER_LOOP = 16
BAND_LOW_HZ = 180.0
BAND_HIGH_HZ = 3200.0
TARGET_RMS_DBFS = -18.0
MANIFEST_NAME = "manifest.txt"

VALID_SAMPLE_RATES = (44100, 48000)
MIN_BPM, MAX_BPM = 60.0, 200.0

# Highest partial frequency placed by any voice; leaves room for the band
# shaper's upper skirt (2850..3200 Hz).
_TOP_PARTIAL_HZ = 2900.0

# A minor pentatonic over two octaves, rooted at 220 Hz.
_ROOT_HZ = 220.0
_SCALE_SEMITONES = (0, 3, 5, 7, 10, 12, 15, 17)


def _scale_freq(idx: int) -> float:
    return _ROOT_HZ * 2.0 ** (_SCALE_SEMITONES[idx] / 12.0)


@dataclass(frozen=True)
class NoteEvent:
    beat: float
    freq_hz: float
    dur_beats: float
    velocity: float


@dataclass(frozen=True, eq=False)
class StemBank:
    """Five equal-length mono loops plus the note material that built them."""

    sample_rate_hz: int
    bpm: float
    beats: int
    buffers: dict[InstrumentId, np.ndarray]
    note_events: dict[InstrumentId, tuple[NoteEvent, ...]]
    seed: int | None = None

    @property
    def loop_len_samples(self) -> int:
        return next(iter(self.buffers.values())).size

    @property
    def loop_duration_s(self) -> float:
        return self.loop_len_samples / self.sample_rate_hz


def loop_length_samples(sample_rate_hz: int, bpm: float) -> int:
    return round(sample_rate_hz * 60.0 / bpm * BEATS_PER_LOOP)


def verify_band(buffer: np.ndarray, sample_rate_hz: int) -> float:
    """Fraction of spectral energy inside [180, 3200] Hz.

    Uses one full-length power spectrum. A silent buffer counts as 0.0
    (no energy lies in band).

    Raises:
        DomainError: empty or non-mono buffer.
    """
    x = np.asarray(buffer, dtype=np.float64)
    if x.ndim != 1:
        raise DomainError(f"mono contract: buffer must be 1-D, got shape {x.shape}")
    if x.size == 0:
        raise DomainError("empty buffer")
    power = np.abs(np.fft.rfft(x)) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    freqs = np.fft.rfftfreq(x.size, 1.0 / sample_rate_hz)
    in_band = float(power[(freqs >= BAND_LOW_HZ) & (freqs <= BAND_HIGH_HZ)].sum())
    return in_band / total


# ---------------------------------------------------------------------------
# Voice synthesis. Each helper renders one event into a fresh array; events
# are then added into the loop with wraparound, which is what makes the
# stems seamless.

def _release(x: np.ndarray, sample_rate_hz: int, fade_s: float = 0.02) -> np.ndarray:
    k = min(x.size, max(8, int(fade_s * sample_rate_hz)))
    x[-k:] *= 0.5 + 0.5 * np.cos(np.linspace(0.0, np.pi, k))
    return x


def _piano_note(sr: int, f0: float, dur_s: float, vel: float) -> np.ndarray:
    n = int((dur_s + 0.9) * sr)
    t = np.arange(n) / sr
    x = np.zeros(n)
    for k in range(1, 7):
        f = f0 * k
        if f > _TOP_PARTIAL_HZ:
            break
        tau = 0.55 / (1.0 + 0.7 * (k - 1))
        x += k ** -1.05 * np.exp(-t / tau) * np.sin(2.0 * np.pi * f * t)
    x *= vel * (1.0 - np.exp(-t / 0.004))
    return _release(x, sr)


def _keyboard_note(sr: int, f0: float, dur_s: float, vel: float) -> np.ndarray:
    n = int(dur_s * sr)
    t = np.arange(n) / sr
    vib = 0.0009 * np.sin(2.0 * np.pi * 5.2 * t)
    x = np.zeros(n)
    for ratio, amp in ((1, 1.0), (2, 0.42), (3, 0.22)):
        f = f0 * ratio
        if f > _TOP_PARTIAL_HZ:
            break
        x += amp * np.sin(2.0 * np.pi * f * (t + vib))
    x *= vel * 0.6 * (1.0 - np.exp(-t / 0.012))
    return _release(x, sr, fade_s=0.07)


def _guitar_note(sr: int, f0: float, dur_s: float, vel: float) -> np.ndarray:
    n = int((dur_s + 0.3) * sr)
    t = np.arange(n) / sr
    x = np.exp(-t / 0.22) * np.sin(2.0 * np.pi * f0 * t)
    if f0 * 2 <= _TOP_PARTIAL_HZ:
        x += 0.55 * np.exp(-t / 0.15) * np.sin(2.0 * np.pi * f0 * 2 * t)
    if f0 * 3 <= _TOP_PARTIAL_HZ:
        x += 0.3 * np.exp(-t / 0.1) * np.sin(2.0 * np.pi * f0 * 3 * t)
    x *= 1.0 - np.exp(-t / 0.003)
    x = np.tanh(2.2 * vel * x) * 0.62  # mild pluck saturation
    return _release(x, sr)


def _noise_burst(sr: int, rng: np.random.Generator, dur_s: float,
                 f_lo: float, f_hi: float, decay_s: float,
                 n_sines: int = 48) -> np.ndarray:
    n = int(dur_s * sr)
    t = np.arange(n) / sr
    freqs = rng.uniform(f_lo, f_hi, n_sines)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_sines)
    x = np.sin(2.0 * np.pi * freqs[:, None] * t[None, :] + phases[:, None])
    x = x.sum(axis=0) / math.sqrt(n_sines)
    x *= np.exp(-t / decay_s) * (1.0 - np.exp(-t / 0.0008))
    return x


def _tom(sr: int, rng: np.random.Generator, vel: float) -> np.ndarray:
    n = int(0.3 * sr)
    t = np.arange(n) / sr
    freq = 205.0 + 50.0 * np.exp(-t / 0.06)  # glide 255 -> 205 Hz, stays >= 200
    phase = 2.0 * np.pi * np.cumsum(freq) / sr
    x = np.sin(phase) * np.exp(-t / 0.1)
    x += 0.3 * _noise_burst(sr, rng, 0.3, 350.0, 900.0, 0.02)[:n]
    x *= vel * (1.0 - np.exp(-t / 0.001))
    return _release(x, sr)


def _synth_stab(sr: int, f0: float, dur_s: float, vel: float,
                wobble_phase: float) -> np.ndarray:
    n = int(dur_s * sr)
    t = np.arange(n) / sr
    freq = f0 * (1.0 + 0.013 * np.sin(2.0 * np.pi * 6.5 * t + wobble_phase))
    phase = 2.0 * np.pi * np.cumsum(freq) / sr
    x = np.sin(phase) + 0.42 * np.sin(3.0 * phase)  # bright odd-harmonic pulse
    tremolo = 1.0 - 0.25 * (0.5 - 0.5 * np.cos(2.0 * np.pi * 9.0 * t))
    x *= vel * 0.8 * tremolo * (1.0 - np.exp(-t / 0.005))
    return _release(x, sr, fade_s=0.04)


def _add_wrapped(buf: np.ndarray, start: int, event: np.ndarray) -> None:
    """Mix an event into the loop starting at `start`, wrapping any tail."""
    loop_len = buf.size
    start %= loop_len
    pos = start
    remaining = event
    while remaining.size:
        n = min(loop_len - pos, remaining.size)
        buf[pos:pos + n] += remaining[:n]
        remaining = remaining[n:]
        pos = 0
    return


# ---------------------------------------------------------------------------
# Composition: all RNG draws happen in one fixed order so a seed pins the
# whole bank bit-for-bit.

def _compose_melody(rng: np.random.Generator) -> tuple[NoteEvent, ...]:
    idx = int(rng.integers(2, 5))
    events = []
    for beat in range(BEATS_PER_LOOP):
        step = int(rng.choice(np.array([-2, -1, -1, 0, 1, 1, 2])))
        idx = min(max(idx + step, 0), len(_SCALE_SEMITONES) - 1)
        vel = 0.72 + 0.25 * float(rng.random())
        events.append(NoteEvent(float(beat), _scale_freq(idx), 0.95, vel))
    return tuple(events)


def _compose_guitar(rng: np.random.Generator) -> tuple[NoteEvent, ...]:
    choices = (220.0, _ROOT_HZ * 2.0 ** (7.0 / 12.0), 440.0)  # A3, E4, A4
    events = []
    for k in range(2 * BEATS_PER_LOOP):
        keep = float(rng.random())
        fsel = int(rng.integers(0, 3))
        vel = 0.5 + 0.3 * float(rng.random())
        if keep < 0.7:
            events.append(NoteEvent(k * 0.5, choices[fsel], 0.5, vel))
    if not events:
        events.append(NoteEvent(0.0, choices[0], 0.5, 0.7))
    return tuple(events)


def _compose_synth(rng: np.random.Generator) -> tuple[NoteEvent, ...]:
    choices = (_ROOT_HZ * 2.0 ** (19.0 / 12.0), 880.0)  # E5, A5
    events = []
    for beat in range(BEATS_PER_LOOP):
        keep = float(rng.random())
        fsel = int(rng.integers(0, 2))
        vel = 0.6 + 0.25 * float(rng.random())
        if keep < 0.85:
            events.append(NoteEvent(float(beat), choices[fsel], 0.45, vel))
    if not events:
        events.append(NoteEvent(0.0, choices[1], 0.45, 0.7))
    return tuple(events)


def _band_shape(x: np.ndarray, sr: int) -> np.ndarray:
    """Circular band filter: raised-cosine skirts inside [180, 3200] Hz.

    Operating on the full loop's FFT keeps the result exactly periodic, so
    the loop seam stays as smooth as any interior transition.
    """
    spectrum = np.fft.rfft(x)
    f = np.fft.rfftfreq(x.size, 1.0 / sr)
    w = np.zeros_like(f)
    rise = (f >= BAND_LOW_HZ) & (f < 225.0)
    w[rise] = 0.5 - 0.5 * np.cos(np.pi * (f[rise] - BAND_LOW_HZ) / (225.0 - BAND_LOW_HZ))
    w[(f >= 225.0) & (f <= 2850.0)] = 1.0
    fall = (f > 2850.0) & (f <= BAND_HIGH_HZ)
    w[fall] = 0.5 + 0.5 * np.cos(np.pi * (f[fall] - 2850.0) / (BAND_HIGH_HZ - 2850.0))
    return np.fft.irfft(spectrum * w, x.size)


def _fit_level(x: np.ndarray, sr: int, label: str) -> np.ndarray:
    """Normalize RMS to the -18 dBFS target while keeping peak <= 1.

    High-crest material is tamed by gentle tanh passes (re-band-shaped,
    since saturation spreads the spectrum) until the normalized stem fits.
    """
    target = 10.0 ** (TARGET_RMS_DBFS / 20.0)
    for _ in range(8):
        rms = float(np.sqrt(np.mean(np.square(x))))
        if rms == 0.0:
            raise ConfigurationError(f"{label}: silent stem cannot be normalized")
        x = x * (target / rms)
        if float(np.max(np.abs(x))) <= 1.0:
            return x
        x = np.tanh(x / 1.15) * 1.15
        x = _band_shape(x, sr)
    raise ConfigurationError(f"{label}: could not fit level within peak bound")


def generate_stems(seed: int, sample_rate_hz: int = 48000,
                   bpm: float = 120.0) -> StemBank:
    """Generate the five-stem loop bank, bit-deterministic per (seed, rate, bpm).

    Raises:
        ConfigurationError: unsupported sample rate, bpm outside [60, 200],
            or negative seed.
    """
    if sample_rate_hz not in VALID_SAMPLE_RATES:
        raise ConfigurationError(
            f"sample_rate_hz must be one of {VALID_SAMPLE_RATES}, got {sample_rate_hz}")
    if not MIN_BPM <= bpm <= MAX_BPM:
        raise ConfigurationError(f"bpm must lie in [{MIN_BPM}, {MAX_BPM}], got {bpm}")
    if seed < 0:
        raise ConfigurationError(f"seed must be non-negative, got {seed}")

    sr = sample_rate_hz
    loop_len = loop_length_samples(sr, bpm)
    spb = 60.0 / bpm * sr  # samples per beat
    rng = np.random.default_rng(seed)

    melody = _compose_melody(rng)
    guitar_riff = _compose_guitar(rng)
    synth_line = _compose_synth(rng)

    buffers = {iid: np.zeros(loop_len) for iid in InstrumentId}

    for ev in melody:
        dur_s = ev.dur_beats * 60.0 / bpm
        start = int(round(ev.beat * spb))
        _add_wrapped(buffers[InstrumentId.PIANO], start,
                     _piano_note(sr, ev.freq_hz, dur_s, ev.velocity))
        _add_wrapped(buffers[InstrumentId.KEYBOARD], start,
                     _keyboard_note(sr, ev.freq_hz, dur_s, ev.velocity))

    for ev in guitar_riff:
        dur_s = ev.dur_beats * 60.0 / bpm
        start = int(round(ev.beat * spb))
        _add_wrapped(buffers[InstrumentId.GUITAR], start,
                     _guitar_note(sr, ev.freq_hz, dur_s, ev.velocity))

    drums = buffers[InstrumentId.DRUMS]
    for bar in range(4):
        vel = 0.9 + 0.1 * float(rng.random())
        _add_wrapped(drums, int(round(bar * 4 * spb)), _tom(sr, rng, vel))
        snare_vel = 0.85 + 0.12 * float(rng.random())
        snare = snare_vel * (
            _noise_burst(sr, rng, 0.16, 300.0, 1500.0, 0.045)
            + 0.5 * _noise_burst(sr, rng, 0.16, 200.0, 260.0, 0.07, n_sines=8))
        _add_wrapped(drums, int(round((bar * 4 + 2) * spb)), _release(snare, sr))
    for k in range(2 * BEATS_PER_LOOP):
        vel = (0.5 if k % 2 == 0 else 0.33) * (1.0 + 0.15 * (float(rng.random()) - 0.5))
        hat = vel * _noise_burst(sr, rng, 0.05, 1700.0, 3000.0, 0.008)
        _add_wrapped(drums, int(round(k * 0.5 * spb)), _release(hat, sr, 0.01))

    for ev in synth_line:
        dur_s = ev.dur_beats * 60.0 / bpm
        wobble_phase = float(rng.uniform(0.0, 2.0 * np.pi))
        start = int(round(ev.beat * spb))
        _add_wrapped(buffers[InstrumentId.SYNTH], start,
                     _synth_stab(sr, ev.freq_hz, dur_s, ev.velocity, wobble_phase))

    for iid in InstrumentId:
        shaped = _band_shape(buffers[iid], sr)
        buffers[iid] = _fit_level(shaped, sr, iid.value)

    note_events = {
        InstrumentId.PIANO: melody,
        InstrumentId.KEYBOARD: melody,
        InstrumentId.GUITAR: guitar_riff,
        InstrumentId.DRUMS: (),
        InstrumentId.SYNTH: synth_line,
    }
    return StemBank(sample_rate_hz=sr, bpm=bpm, beats=BEATS_PER_LOOP,
                    buffers=buffers, note_events=note_events, seed=seed)


# ---------------------------------------------------------------------------
# Export / load.

def stem_filename(iid: InstrumentId) -> str:
    return f"{iid.value}.wav"


def export_stems(bank: StemBank, out_dir: str | Path) -> None:
    """Write the five stems as float32 WAVs plus a plain-text manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    if bank.seed is not None:
        lines.append(f"seed = {bank.seed}")
    lines += [
        f"sample_rate_hz = {bank.sample_rate_hz}",
        f"bpm = {bank.bpm:g}",
        f"beats = {bank.beats}",
        f"loop_len_samples = {bank.loop_len_samples}",
    ]
    for iid in InstrumentId:
        x = bank.buffers[iid]
        write_wav(x, bank.sample_rate_hz, out_dir / stem_filename(iid))
        rms_db = 20.0 * math.log10(float(np.sqrt(np.mean(np.square(x)))))
        lines += [
            f"{iid.value}_file = {stem_filename(iid)}",
            f"{iid.value}_rms_dbfs = {rms_db:.4f}",
            f"{iid.value}_band_fraction = {verify_band(x, bank.sample_rate_hz):.6f}",
        ]
    manifest = out_dir / MANIFEST_NAME
    tmp = manifest.with_name(manifest.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(manifest)


def read_manifest(path: str | Path) -> dict[str, str]:
    """Parse the flat key-value manifest into a string map."""
    entries: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


def load_stems(stem_dir: str | Path) -> StemBank:
    """Load an exported bank (float32 buffers; note events are not persisted).

    Raises:
        FileNotFoundError: missing directory, manifest, or stem file.
        DomainError: stems disagree in length or sample rate.
    """
    stem_dir = Path(stem_dir)
    manifest = read_manifest(stem_dir / MANIFEST_NAME)
    buffers: dict[InstrumentId, np.ndarray] = {}
    rate: int | None = None
    for iid in InstrumentId:
        samples, sr = read_wav(stem_dir / manifest.get(f"{iid.value}_file",
                                                       stem_filename(iid)))
        if rate is None:
            rate = sr
        elif sr != rate:
            raise DomainError(f"{stem_dir}: stems disagree in sample rate")
        buffers[iid] = samples
    lengths = {buffers[iid].size for iid in InstrumentId}
    if len(lengths) != 1:
        raise DomainError(f"{stem_dir}: stems disagree in length")
    assert rate is not None
    seed = manifest.get("seed")
    return StemBank(
        sample_rate_hz=rate,
        bpm=float(manifest.get("bpm", "120")),
        beats=int(manifest.get("beats", str(BEATS_PER_LOOP))),
        buffers=buffers,
        note_events={iid: () for iid in InstrumentId},
        seed=int(seed) if seed is not None else None,
    )
