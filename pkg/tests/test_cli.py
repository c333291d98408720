"""Tests for the command-line interface."""

from __future__ import annotations

import numpy as np
import pytest

from tiltmix.cli import EXIT_CONSTRAINT, EXIT_INPUT, EXIT_IO, EXIT_OK, build_parser, main
from tiltmix.engine import TRAJECTORY_HEADER, read_wav, write_wav
from tiltmix.stems import MANIFEST_NAME, export_stems, load_stems


@pytest.fixture(scope="module")
def stems_dir(tmp_path_factory, bank42):
    out = tmp_path_factory.mktemp("cli-stems")
    export_stems(bank42, out)
    return out


def write_trajectory(path, rows):
    lines = [TRAJECTORY_HEADER] + [f"{t},{p},{r}" for t, p, r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


class TestParser:
    def test_no_arguments_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args([])
        assert info.value.code == 2

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args(["render", "a.csv", "b.wav", "--loudness", "9"])
        assert info.value.code == 2

    def test_serve_flags_parse(self):
        args = build_parser().parse_args(["serve", "--port", "9100", "--seed", "7"])
        assert args.command == "serve"
        assert args.port == 9100
        assert args.seed == 7
        assert args.host == "127.0.0.1"
        assert args.ui is None

    def test_render_flags_parse(self):
        args = build_parser().parse_args(
            ["render", "traj.csv", "out.wav", "--duration", "4.5", "--sample-rate", "44100"]
        )
        assert args.command == "render"
        assert args.duration == 4.5
        assert args.sample_rate == 44100


class TestRender:
    def test_level_trajectory_renders(self, tmp_path, stems_dir, capsys):
        traj = write_trajectory(tmp_path / "level.csv", [(0, 0, 0), (2, 0, 0)])
        out = tmp_path / "out.wav"
        code = main(["render", str(traj), str(out), "--stems", str(stems_dir)])
        assert code == EXIT_OK
        audio, rate = read_wav(out)
        assert rate == 48000
        assert audio.shape == (96000,)
        assert float(np.max(np.abs(audio))) < 1.0
        printed = capsys.readouterr().out
        assert "peak" in printed
        assert "piano" in printed

    def test_duration_extends_past_trajectory(self, tmp_path, stems_dir):
        traj = write_trajectory(tmp_path / "short.csv", [(0, 0, 0), (1, 0, 45)])
        out = tmp_path / "ext.wav"
        code = main(
            ["render", str(traj), str(out), "--stems", str(stems_dir), "--duration", "3"]
        )
        assert code == EXIT_OK
        audio, _ = read_wav(out)
        assert audio.shape == (144000,)

    def test_repeat_renders_bit_identical(self, tmp_path, stems_dir):
        traj = write_trajectory(tmp_path / "m.csv", [(0, 0, 0), (1, 20, -30)])
        out_a = tmp_path / "a.wav"
        out_b = tmp_path / "b.wav"
        assert main(["render", str(traj), str(out_a), "--stems", str(stems_dir)]) == EXIT_OK
        assert main(["render", str(traj), str(out_b), "--stems", str(stems_dir)]) == EXIT_OK
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_malformed_row_is_input_error_with_line(self, tmp_path, stems_dir, capsys):
        traj = tmp_path / "bad.csv"
        traj.write_text(f"{TRAJECTORY_HEADER}\nabc,0,0\n")
        code = main(["render", str(traj), str(tmp_path / "x.wav"), "--stems", str(stems_dir)])
        assert code == EXIT_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_missing_trajectory_is_io_error(self, tmp_path, stems_dir):
        code = main(
            ["render", str(tmp_path / "nope.csv"), str(tmp_path / "x.wav"),
             "--stems", str(stems_dir)]
        )
        assert code == EXIT_IO

    def test_unwritable_output_is_io_error(self, tmp_path, stems_dir):
        traj = write_trajectory(tmp_path / "t.csv", [(0, 0, 0), (1, 0, 0)])
        out = tmp_path / "no" / "such" / "dir" / "x.wav"
        code = main(["render", str(traj), str(out), "--stems", str(stems_dir)])
        assert code == EXIT_IO

    def test_too_short_duration_is_input_error(self, tmp_path, stems_dir):
        traj = write_trajectory(tmp_path / "t.csv", [(0, 0, 0), (2, 0, 0)])
        code = main(
            ["render", str(traj), str(tmp_path / "x.wav"), "--stems", str(stems_dir),
             "--duration", "1"]
        )
        assert code == EXIT_INPUT

    def test_invalid_bpm_is_input_error(self, tmp_path):
        traj = write_trajectory(tmp_path / "t.csv", [(0, 0, 0), (1, 0, 0)])
        code = main(["render", str(traj), str(tmp_path / "x.wav"), "--bpm", "500"])
        assert code == EXIT_INPUT


class TestStems:
    def test_export_with_overrides(self, tmp_path, capsys):
        out = tmp_path / "bank"
        code = main(
            ["stems", str(out), "--seed", "7", "--sample-rate", "44100", "--bpm", "150"]
        )
        assert code == EXIT_OK
        assert (out / MANIFEST_NAME).exists()
        bank = load_stems(out)
        assert bank.sample_rate_hz == 44100
        assert bank.bpm == 150.0
        assert bank.seed == 7
        assert str(out) in capsys.readouterr().out

    def test_invalid_bpm_is_input_error(self, tmp_path):
        assert main(["stems", str(tmp_path / "x"), "--bpm", "10"]) == EXIT_INPUT

    def test_invalid_sample_rate_is_input_error(self, tmp_path):
        assert main(["stems", str(tmp_path / "x"), "--sample-rate", "8000"]) == EXIT_INPUT


class TestAnalyze:
    def test_stem_directory_passes(self, stems_dir, capsys):
        code = main(["analyze", str(stems_dir)])
        assert code == EXIT_OK
        printed = capsys.readouterr().out
        assert printed.count("in-band") == 5
        assert "piano.wav" in printed

    def test_single_file_passes(self, stems_dir):
        assert main(["analyze", str(stems_dir / "piano.wav")]) == EXIT_OK

    def test_out_of_band_tone_fails_constraint(self, tmp_path):
        t = np.arange(48000) / 48000.0
        tone = (0.5 * np.sin(2 * np.pi * 100.0 * t)).astype(np.float32)
        path = tmp_path / "tone.wav"
        write_wav(tone, 48000, path)
        assert main(["analyze", str(path)]) == EXIT_CONSTRAINT

    def test_empty_directory_is_io_error(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["analyze", str(empty)]) == EXIT_IO
        assert "no .wav" in capsys.readouterr().err

    def test_missing_file_is_io_error(self, tmp_path):
        assert main(["analyze", str(tmp_path / "ghost.wav")]) == EXIT_IO

    def test_garbage_file_is_io_error(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"this is not audio")
        assert main(["analyze", str(path)]) == EXIT_IO
