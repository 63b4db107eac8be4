#!/usr/bin/env python3
"""Render every factory preset to WAV files under ./demos/."""

import os
import struct
import sys

from wintersynth.midifile import parse_midi
from wintersynth.presets import factory_presets
from wintersynth.render import render_offline


def demo_midi() -> bytes:
    # small minor-key phrase for the shadows presets
    def vlq(v):
        out = [v & 0x7F]
        v >>= 7
        while v:
            out.append(0x80 | (v & 0x7F))
            v >>= 7
        return bytes(reversed(out))

    ev = b""
    notes = [(45, 0, 960), (57, 480, 480), (60, 960, 480), (64, 1440, 960), (52, 1920, 960)]
    timeline = []
    for note, on, dur in notes:
        timeline.append((on, 0x90, note, 100))
        timeline.append((on + dur, 0x80, note, 0))
    timeline.sort()
    prev = 0
    for tick, status, note, vel in timeline:
        ev += vlq(tick - prev) + bytes([status, note, vel])
        prev = tick
    payload = ev + b"\x00\xff\x2f\x00"
    return (
        b"MThd" + struct.pack(">IHHH", 6, 0, 1, 480)
        + b"MTrk" + struct.pack(">I", len(payload)) + payload
    )


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "demos"
    os.makedirs(out_dir, exist_ok=True)
    events, _ = parse_midi(demo_midi())
    for name, preset in factory_presets().items():
        if preset.engine == "wintermute":
            wav = render_offline(preset, duration=8.0, seed=1)
        else:
            wav = render_offline(preset, events=events, seed=1)
        path = os.path.join(out_dir, name.replace(" ", "_") + ".wav")
        with open(path, "wb") as f:
            f.write(wav)
        print(f"wrote {path} ({len(wav) // 1024} KiB)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
