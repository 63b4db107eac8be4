"""Deterministic offline rendering: preset + optional note events -> WAV."""

from __future__ import annotations

import numpy as np

from .blocks import CONTROL_BLOCK, AudioBlock
from .midifile import NoteEvent
from .presets import Preset, apply_preset
from .shadows import ShadowsEngine
from .wavio import write_wav
from .wintermute import WintermuteEngine

SUPPORTED_RATES = (44100, 48000, 96000)


class RenderError(Exception):
    pass


def build_engine(preset: Preset, sample_rate: int, seed: int | None = None):
    if seed is None:
        seed = preset.seed if preset.seed is not None else 0
    if preset.engine == "wintermute":
        engine = WintermuteEngine(sample_rate=sample_rate, seed=seed)
    elif preset.engine == "shadows":
        engine = ShadowsEngine(sample_rate=sample_rate, seed=seed)
    else:
        raise RenderError(f"unknown engine {preset.engine!r}")
    apply_preset(engine, preset)
    return engine


def _event_frames(events: list[NoteEvent], sample_rate: int) -> list[tuple[int, NoteEvent]]:
    out = []
    for ev in events:
        frame = int(round(ev.time * sample_rate))
        frame -= frame % CONTROL_BLOCK  # control-block quantization
        out.append((frame, ev))
    out.sort(key=lambda fe: fe[0])
    return out


def render_block(
    preset: Preset,
    events: list[NoteEvent] | None = None,
    duration: float | None = None,
    seed: int | None = None,
    sample_rate: int = 48000,
) -> AudioBlock:
    """Render a preset to an AudioBlock; same inputs give identical output."""
    if sample_rate not in SUPPORTED_RATES:
        raise RenderError(f"sample rate must be one of {SUPPORTED_RATES}")
    if preset.engine == "wintermute":
        if events:
            raise RenderError("the drone engine does not consume note events")
        if duration is None:
            raise RenderError("a duration is required for the drone engine")
    else:
        if not events and duration is None:
            raise RenderError("need note events or a duration")
    engine = build_engine(preset, sample_rate, seed)

    if duration is None:
        release = engine.params.amp.release_seconds()
        duration = max(ev.time for ev in events) + release + 1.0
    n_frames = int(round(duration * sample_rate))
    if n_frames <= 0:
        raise RenderError("duration must be positive")
    padded = -(-n_frames // CONTROL_BLOCK) * CONTROL_BLOCK
    outl = np.zeros(padded)
    outr = np.zeros(padded)

    schedule = _event_frames(events, sample_rate) if events else []
    cursor = 0
    for frame, ev in schedule:
        frame = min(frame, padded)
        if frame > cursor:
            engine.render_into(outl[cursor:frame], outr[cursor:frame])
            cursor = frame
        if ev.kind == "on":
            engine.note_on(ev.note, max(ev.velocity, 1.0 / 127.0))
        else:
            engine.note_off(ev.note)
    if cursor < padded:
        engine.render_into(outl[cursor:], outr[cursor:])
    return AudioBlock(outl[:n_frames], outr[:n_frames], sample_rate).validate_finite()


def render_offline(
    preset: Preset,
    events: list[NoteEvent] | None = None,
    duration: float | None = None,
    seed: int | None = None,
    sample_rate: int = 48000,
) -> bytes:
    return write_wav(render_block(preset, events, duration, seed, sample_rate))
