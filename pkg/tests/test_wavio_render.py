"""WAV format, offline renderer, command-line interface."""

import json
import math
import struct

import numpy as np
import pytest

from wintersynth.blocks import AudioBlock
from wintersynth.cli import main
from wintersynth.midifile import NoteEvent
from wintersynth.presets import factory_presets, get_factory_preset, preset_to_json
from wintersynth.render import RenderError, render_block, render_offline
from wintersynth.wavio import read_wav, write_wav

# frozen once from a reviewed 5 s seed-1 render of the bubbles preset
GOLDEN_BUBBLES_RMS_DB = -49.82


def _tone_block(sr=48000, n=4800):
    t = np.arange(n) / sr
    return AudioBlock(np.sin(2 * np.pi * 440 * t) * 0.5, np.cos(2 * np.pi * 220 * t) * 0.25, sr)


# ---------------------------------------------------------------------------
# WAV format
# ---------------------------------------------------------------------------


def test_wav_chunk_sizes_one_second():
    block = AudioBlock(np.zeros(48000), np.zeros(48000), 48000)
    data = write_wav(block)
    assert data[:4] == b"RIFF" and data[8:12] == b"WAVE"
    idx = data.index(b"data")
    size = struct.unpack_from("<I", data, idx + 4)[0]
    assert size == 48000 * 2 * 4
    fmt_idx = data.index(b"fmt ")
    fmt_tag, channels = struct.unpack_from("<HH", data, fmt_idx + 8)
    assert fmt_tag == 3 and channels == 2  # IEEE float stereo


def test_wav_round_trip():
    block = _tone_block()
    back = read_wav(write_wav(block))
    assert back.sample_rate == block.sample_rate
    assert np.array_equal(back.left, block.left.astype(np.float32).astype(np.float64))
    assert np.array_equal(back.right, block.right.astype(np.float32).astype(np.float64))


def test_wav_reader_rejects_junk():
    with pytest.raises(ValueError):
        read_wav(b"OGGS" + b"\x00" * 64)


# ---------------------------------------------------------------------------
# offline renderer
# ---------------------------------------------------------------------------


def test_render_rejects_bad_rate():
    with pytest.raises(RenderError):
        render_offline(get_factory_preset("bubbles"), duration=0.1, sample_rate=22050)


def test_render_wintermute_needs_duration():
    with pytest.raises(RenderError):
        render_offline(get_factory_preset("bubbles"))


def test_render_wintermute_rejects_events():
    ev = [NoteEvent(0.0, "on", 60, 1.0)]
    with pytest.raises(RenderError):
        render_offline(get_factory_preset("birds"), events=ev, duration=1.0)


def test_render_shadows_needs_input():
    with pytest.raises(RenderError):
        render_offline(get_factory_preset("trance lead"))


def test_render_bytes_deterministic():
    p = get_factory_preset("birds")
    a = render_offline(p, duration=1.0, seed=7)
    b = render_offline(p, duration=1.0, seed=7)
    assert a == b
    c = render_offline(p, duration=1.0, seed=8)
    assert a != c


def test_render_duration_from_events():
    p = get_factory_preset("trance lead")
    events = [NoteEvent(0.0, "on", 60, 0.9), NoteEvent(0.75, "off", 60, 0.0)]
    block = render_block(p, events=events)
    release = 0.12 * 3 + 0.001
    assert block.duration == pytest.approx(0.75 + release + 1.0, abs=0.01)
    assert max(block.peak()) > 1e-4


def test_render_event_quantization_to_blocks():
    p = get_factory_preset("trance lead")
    events = [NoteEvent(0.100001, "on", 64, 0.8), NoteEvent(0.5, "off", 64, 0.0)]
    block = render_block(p, events=events, duration=1.0)
    start = np.nonzero(np.abs(block.left) > 0)[0]
    assert len(start) > 0
    assert start[0] % 16 == 0 or np.abs(block.left[start[0] - start[0] % 16]) == 0.0
    assert abs(start[0] / 48000 - 0.1) < 0.002


def test_render_at_other_sample_rates():
    # 44100 is not a multiple of the control block; exercises the pad+trim path
    p = get_factory_preset("birds")
    for sr in (44100, 96000):
        block = render_block(p, duration=1.0, seed=2, sample_rate=sr)
        assert block.n_frames == sr
        assert np.isfinite(block.left).all()

    ev = [NoteEvent(0.0, "on", 60, 0.8), NoteEvent(0.4, "off", 60, 0.0)]
    block = render_block(get_factory_preset("trance lead"), events=ev, duration=1.0, sample_rate=44100)
    assert block.n_frames == 44100
    assert max(block.peak()) > 1e-5


def test_golden_bubbles_rms():
    block = render_block(get_factory_preset("bubbles"), duration=5.0, seed=1)
    rms = math.sqrt(np.mean((block.left**2 + block.right**2) / 2))
    db = 20 * math.log10(rms)
    assert abs(db - GOLDEN_BUBBLES_RMS_DB) <= 3.0


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _write_midi_fixture(path):
    # one bar: C major arpeggio, hand-assembled SMF type 0
    def vlq(v):
        out = [v & 0x7F]
        v >>= 7
        while v:
            out.append(0x80 | (v & 0x7F))
            v >>= 7
        return bytes(reversed(out))

    ev = b""
    t = 0
    for i, note in enumerate((60, 64, 67, 72)):
        ev += vlq(0 if i == 0 else 240) + bytes([0x90, note, 100])
        ev += vlq(240) + bytes([0x80, note, 0])
    payload = ev + b"\x00\xff\x2f\x00"
    data = (
        b"MThd" + struct.pack(">IHHH", 6, 0, 1, 480)
        + b"MTrk" + struct.pack(">I", len(payload)) + payload
    )
    path.write_bytes(data)
    return path


def test_cli_render_factory_preset(tmp_path, capsys):
    out = tmp_path / "drone.wav"
    code = main(["render", "--preset", "birds", "--duration", "0.5", "--seed", "3", "-o", str(out)])
    assert code == 0
    block = read_wav(out.read_bytes())
    assert block.n_frames == 24000


def test_cli_render_preset_file_and_midi(tmp_path):
    pfile = tmp_path / "lead.json"
    pfile.write_text(preset_to_json(get_factory_preset("trance lead")))
    midi = _write_midi_fixture(tmp_path / "arp.mid")
    out = tmp_path / "lead.wav"
    code = main([
        "render", "--preset", str(pfile), "--midi", str(midi),
        "--seed", "1", "-o", str(out),
    ])
    assert code == 0
    block = read_wav(out.read_bytes())
    assert max(block.peak()) > 1e-4


def test_cli_render_missing_preset_fails(tmp_path, capsys):
    code = main(["render", "--preset", "zzz", "--duration", "1", "-o", str(tmp_path / "x.wav")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_render_bad_args_fail(tmp_path, capsys):
    # shadows preset with neither midi nor duration
    code = main(["render", "--preset", "trance lead", "-o", str(tmp_path / "x.wav")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    for name in factory_presets():
        assert name in out


def test_cli_presets_dump_round_trips(capsys):
    assert main(["presets", "dump", "drips"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["engine"] == "wintermute"
    assert doc["params"]["wintermute.reverb_send"] >= 0.7


def test_cli_presets_dump_unknown(capsys):
    assert main(["presets", "dump", "nope"]) == 1
    assert "error:" in capsys.readouterr().err
