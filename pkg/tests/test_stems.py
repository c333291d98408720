"""Tests for procedural stem generation and spectral verification."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tiltmix.errors import ConfigurationError, DomainError
from tiltmix.gainmap import InstrumentId
from tiltmix.stems import (
    BAND_HIGH_HZ,
    BAND_LOW_HZ,
    MANIFEST_NAME,
    TARGET_RMS_DBFS,
    export_stems,
    generate_stems,
    load_stems,
    verify_band,
)


def rms_dbfs(x: np.ndarray) -> float:
    return 20.0 * math.log10(float(np.sqrt(np.mean(np.square(x)))))


class TestGeneration:
    def test_default_loop_length(self, bank42):
        # Frozen arithmetic oracle: 48000 * 60/120 * 16 = 384000.
        assert bank42.loop_len_samples == 384000
        for iid in InstrumentId:
            assert bank42.buffers[iid].shape == (384000,)

    def test_44100_loop_length(self):
        bank = generate_stems(1, sample_rate_hz=44100)
        # 44100 * 60/120 * 16 = 352800.
        assert bank.loop_len_samples == 352800

    def test_non_divisible_bpm_rounds(self):
        bank = generate_stems(1, bpm=140.0)
        # round(48000 * 60/140 * 16) = round(329142.857...) = 329143.
        assert bank.loop_len_samples == 329143

    def test_determinism_bit_identical(self, bank42):
        again = generate_stems(42)
        for iid in InstrumentId:
            a, b = bank42.buffers[iid], again.buffers[iid]
            assert a.dtype == b.dtype
            assert np.array_equal(a, b)

    def test_seed_changes_content(self, bank42):
        other = generate_stems(43)
        assert any(
            not np.array_equal(bank42.buffers[iid], other.buffers[iid])
            for iid in InstrumentId)

    def test_piano_and_keyboard_share_the_melody(self, bank42):
        piano = bank42.note_events[InstrumentId.PIANO]
        keyboard = bank42.note_events[InstrumentId.KEYBOARD]
        assert len(piano) > 0
        assert piano == keyboard
        # ... with different timbres.
        assert not np.array_equal(
            bank42.buffers[InstrumentId.PIANO],
            bank42.buffers[InstrumentId.KEYBOARD])

    def test_rms_matching(self, bank42):
        levels = {iid: rms_dbfs(bank42.buffers[iid]) for iid in InstrumentId}
        for level in levels.values():
            assert level == pytest.approx(TARGET_RMS_DBFS, abs=0.25)
        vals = list(levels.values())
        assert max(vals) - min(vals) <= 0.25

    def test_peak_bound(self, bank42):
        for iid in InstrumentId:
            assert float(np.max(np.abs(bank42.buffers[iid]))) <= 1.0

    def test_band_fraction(self, bank42):
        for iid in InstrumentId:
            assert verify_band(bank42.buffers[iid], bank42.sample_rate_hz) >= 0.95

    def test_loop_seam(self, bank42):
        for iid in InstrumentId:
            x = bank42.buffers[iid]
            seam = abs(float(x[-1] - x[0]))
            assert seam <= 0.05
            # Stronger: across two consecutive passes the seam transition is
            # no larger than the biggest transition inside the stem.
            interior = float(np.max(np.abs(np.diff(x))))
            assert seam <= interior

    @pytest.mark.parametrize("kwargs", [
        {"sample_rate_hz": 22050},
        {"sample_rate_hz": 96000},
        {"bpm": 30.0},
        {"bpm": 250.0},
        {"seed": -1},
    ])
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            generate_stems(kwargs.pop("seed", 1), **kwargs)

    @settings(max_examples=3, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_invariants_hold_for_arbitrary_seeds(self, seed):
        bank = generate_stems(seed)
        for iid in InstrumentId:
            x = bank.buffers[iid]
            assert x.shape == (384000,)
            assert float(np.max(np.abs(x))) <= 1.0
            assert rms_dbfs(x) == pytest.approx(TARGET_RMS_DBFS, abs=0.25)
            assert verify_band(x, 48000) >= 0.95
            assert abs(float(x[-1] - x[0])) <= 0.05


class TestVerifyBand:
    def test_in_band_tone(self):
        sr = 48000
        t = np.arange(sr) / sr
        assert verify_band(np.sin(2 * np.pi * 1000.0 * t), sr) >= 0.999

    def test_out_of_band_tone(self):
        sr = 48000
        t = np.arange(sr) / sr
        assert verify_band(np.sin(2 * np.pi * 100.0 * t), sr) <= 0.05

    def test_band_edges(self):
        sr = 48000
        t = np.arange(sr) / sr
        inside = np.sin(2 * np.pi * 200.0 * t) + np.sin(2 * np.pi * 3000.0 * t)
        assert verify_band(inside, sr) >= 0.999
        assert BAND_LOW_HZ < 200.0 and BAND_HIGH_HZ > 3000.0

    def test_empty_buffer_rejected(self):
        with pytest.raises(DomainError):
            verify_band(np.array([]), 48000)

    def test_multichannel_rejected(self):
        with pytest.raises(DomainError):
            verify_band(np.zeros((2, 100)), 48000)


class TestExport:
    def test_export_writes_stems_and_manifest(self, bank42, tmp_path):
        export_stems(bank42, tmp_path)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == sorted(
            [MANIFEST_NAME] + [f"{iid.value}.wav" for iid in InstrumentId])
        # 44-byte preamble + 4 bytes per float32 sample.
        wav = tmp_path / "piano.wav"
        assert wav.stat().st_size == 44 + 4 * bank42.loop_len_samples

    def test_manifest_contents(self, bank42, tmp_path):
        export_stems(bank42, tmp_path)
        text = (tmp_path / MANIFEST_NAME).read_text()
        assert "seed = 42" in text
        assert "bpm = 120" in text
        assert "sample_rate_hz = 48000" in text
        for iid in InstrumentId:
            assert f"{iid.value}_file = {iid.value}.wav" in text
            assert f"{iid.value}_rms_dbfs" in text
            assert f"{iid.value}_band_fraction" in text

    def test_load_round_trips(self, bank42, tmp_path):
        export_stems(bank42, tmp_path)
        loaded = load_stems(tmp_path)
        assert loaded.sample_rate_hz == bank42.sample_rate_hz
        assert loaded.bpm == bank42.bpm
        assert loaded.loop_len_samples == bank42.loop_len_samples
        for iid in InstrumentId:
            assert np.array_equal(
                loaded.buffers[iid],
                bank42.buffers[iid].astype(np.float32))

    def test_load_missing_dir_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_stems(tmp_path / "missing")
