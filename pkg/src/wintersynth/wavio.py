"""RIFF/WAVE I/O, 32-bit float little-endian stereo only.

Float output keeps renders bit-stable across platforms; the reader exists
for tests and tooling.
"""

from __future__ import annotations

import struct

import numpy as np

from .blocks import AudioBlock

WAVE_FORMAT_IEEE_FLOAT = 3


def write_wav(block: AudioBlock) -> bytes:
    """Encode a stereo block as float32 WAV bytes."""
    data = np.empty((block.n_frames, 2), dtype="<f4")
    data[:, 0] = block.left
    data[:, 1] = block.right
    payload = data.tobytes()
    sr = block.sample_rate
    byte_rate = sr * 2 * 4
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 4 + 26 + 12 + 8 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHHH", 18, WAVE_FORMAT_IEEE_FLOAT, 2, sr, byte_rate, 8, 32, 0),
            b"fact",
            struct.pack("<II", 4, block.n_frames),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    return header + payload


def write_wav_file(path, block: AudioBlock) -> None:
    with open(path, "wb") as f:
        f.write(write_wav(block))


def read_wav(data: bytes) -> AudioBlock:
    """Decode float32 stereo WAV bytes produced by write_wav."""
    if data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        size = struct.unpack_from("<I", data, pos + 4)[0]
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise ValueError("missing fmt or data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != WAVE_FORMAT_IEEE_FLOAT or bits != 32 or channels != 2:
        raise ValueError("only 32-bit float stereo WAV is supported")
    frames = np.frombuffer(payload, dtype="<f4").reshape(-1, 2)
    return AudioBlock(
        frames[:, 0].astype(np.float64),
        frames[:, 1].astype(np.float64),
        sample_rate,
    )


def read_wav_file(path) -> AudioBlock:
    with open(path, "rb") as f:
        return read_wav(f.read())
