"""Standard MIDI File (type 0/1) reader: note events plus the tempo map.

Only note-on/note-off and set-tempo are interpreted; everything else is
skipped. Note-on with velocity 0 counts as note-off, per convention.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_TEMPO = 500000  # microseconds per quarter note


class MidiParseError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class NoteEvent:
    time: float  # seconds
    kind: str  # "on" | "off"
    note: int
    velocity: float  # 0..1


class TempoMap:
    """Piecewise tempo: converts absolute ticks to seconds."""

    def __init__(self, division: int, changes: list[tuple[int, int]]):
        self.division = division
        merged = {0: DEFAULT_TEMPO}
        for tick, tempo in sorted(changes):
            merged[tick] = tempo
        self.changes = sorted(merged.items())
        self._seconds = []
        elapsed = 0.0
        for i, (tick, tempo) in enumerate(self.changes):
            if i > 0:
                prev_tick, prev_tempo = self.changes[i - 1]
                elapsed += (tick - prev_tick) * prev_tempo / (1e6 * division)
            self._seconds.append(elapsed)

    def to_seconds(self, tick: int) -> float:
        base_tick, tempo = self.changes[0]
        base_s = self._seconds[0]
        for i, (t, tp) in enumerate(self.changes):
            if t > tick:
                break
            base_tick, tempo, base_s = t, tp, self._seconds[i]
        return base_s + (tick - base_tick) * tempo / (1e6 * self.division)


class _Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def need(self, n: int, what: str):
        if self.pos + n > len(self.data):
            raise MidiParseError(f"truncated {what}", self.pos)

    def bytes(self, n: int, what: str) -> bytes:
        self.need(n, what)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.bytes(1, what)[0]

    def u16(self, what: str) -> int:
        return int.from_bytes(self.bytes(2, what), "big")

    def u32(self, what: str) -> int:
        return int.from_bytes(self.bytes(4, what), "big")

    def varlen(self, what: str) -> int:
        value = 0
        for _ in range(4):
            b = self.u8(what)
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise MidiParseError(f"overlong varlen in {what}", self.pos)


def parse_midi(data: bytes) -> tuple[list[NoteEvent], TempoMap]:
    """Returns time-ordered note events and the tempo map."""
    r = _Reader(data)
    if r.bytes(4, "header") != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    hlen = r.u32("header length")
    if hlen < 6:
        raise MidiParseError("short MThd chunk", r.pos)
    fmt = r.u16("format")
    ntrks = r.u16("track count")
    division = r.u16("division")
    r.bytes(hlen - 6, "header padding")
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported SMF format {fmt}", 8)
    if division & 0x8000:
        raise MidiParseError("SMPTE time division is not supported", 12)
    if division == 0:
        raise MidiParseError("zero time division", 12)

    raw_notes: list[tuple[int, int, str, int, int]] = []  # tick, order, kind, note, vel
    tempo_changes: list[tuple[int, int]] = []
    order = 0
    for _ in range(ntrks):
        if r.bytes(4, "track header") != b"MTrk":
            raise MidiParseError("missing MTrk header", r.pos - 4)
        tlen = r.u32("track length")
        r.need(tlen, "track data")
        end = r.pos + tlen
        tick = 0
        running = None
        while r.pos < end:
            tick += r.varlen("delta time")
            b = r.u8("event status")
            if b == 0xFF:
                meta = r.u8("meta type")
                length = r.varlen("meta length")
                payload = r.bytes(length, "meta payload")
                if meta == 0x51:
                    if length != 3:
                        raise MidiParseError("bad set-tempo length", r.pos - length)
                    tempo_changes.append((tick, int.from_bytes(payload, "big")))
                running = None  # meta events cancel running status
                continue
            if b in (0xF0, 0xF7):
                r.bytes(r.varlen("sysex length"), "sysex payload")
                running = None
                continue
            if b & 0x80:
                status = b
                running = status
                first = None
            else:
                if running is None:
                    raise MidiParseError("data byte without running status", r.pos - 1)
                status = running
                first = b
            kind = status & 0xF0
            n_data = 1 if kind in (0xC0, 0xD0) else 2
            d1 = first if first is not None else r.u8("event data")
            d2 = r.u8("event data") if n_data == 2 else 0
            if kind == 0x90 and d2 > 0:
                raw_notes.append((tick, order, "on", d1, d2))
            elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                raw_notes.append((tick, order, "off", d1, d2))
            order += 1
        r.pos = end

    tempo_map = TempoMap(division, tempo_changes)
    raw_notes.sort(key=lambda e: (e[0], e[1]))
    events = [
        NoteEvent(
            time=tempo_map.to_seconds(tick),
            kind=kind,
            note=note,
            velocity=vel / 127.0,
        )
        for tick, _, kind, note, vel in raw_notes
    ]
    return events, tempo_map
