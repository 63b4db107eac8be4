"""Per-note alias-free sawtooth tables and the morph/supersaw oscillators.

One 8192-sample table per MIDI note, holding only the partials that fit
below Nyquist at that note's fundamental. The bank costs 128 x 8192
float64 (~8 MB) and builds in well under a second via inverse FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import CONTROL_BLOCK
from . import kernels

TABLE_SIZE = 8192

# Fixed per-voice detune ratios and stereo placements of the 8-voice stack.
SUPERSAW_DETUNE = np.array(
    [0.0024, 0.019, -0.019, -0.0023, 0.0046, -0.0046, 0.0093, -0.0093]
)
SUPERSAW_PAN = np.array([0.5, -0.5, -0.5, 0.5, 0.5, -0.5, -0.5, 0.5])

PW_MIN = 0.05
PW_MAX = 0.95


def midi_to_hz(note: float) -> float:
    return 440.0 * 2.0 ** ((note - 69) / 12.0)


def max_harmonic(note: int, sample_rate: float) -> int:
    """Highest partial index that stays below Nyquist for this note."""
    if not 0 <= note <= 127:
        raise ValueError("note out of MIDI range")
    if sample_rate <= 0:
        raise ValueError("sample rate must be positive")
    return max(1, int(sample_rate / (2.0 * midi_to_hz(note))))


@dataclass(frozen=True)
class Wavetable:
    samples: np.ndarray  # one cycle, TABLE_SIZE floats
    note: int
    kind: str = "saw"


def build_saw_table(note: int, sample_rate: float) -> Wavetable:
    """Band-limited sawtooth: sum of 1/k-weighted sine partials up to
    max_harmonic(note), peak-normalized to 1."""
    imaxh = min(max_harmonic(note, sample_rate), TABLE_SIZE // 2 - 1)
    spectrum = np.zeros(TABLE_SIZE // 2 + 1, dtype=np.complex128)
    k = np.arange(1, imaxh + 1)
    # irfft convention: x[j] = sum a_k*sin(2*pi*k*j/N) needs S[k] = -0.5j*N*a_k
    spectrum[1 : imaxh + 1] = -0.5j * TABLE_SIZE / k
    samples = np.fft.irfft(spectrum, n=TABLE_SIZE)
    samples /= np.max(np.abs(samples))
    samples.flags.writeable = False
    return Wavetable(samples=samples, note=note)


class WavetableBank:
    """Immutable table per MIDI note 0..127 for one sample rate."""

    def __init__(self, sample_rate: float):
        self.sample_rate = sample_rate
        self.tables = np.empty((128, TABLE_SIZE))
        self._wavetables = []
        for note in range(128):
            wt = build_saw_table(note, sample_rate)
            self.tables[note] = wt.samples
            self._wavetables.append(wt)
        self.tables.flags.writeable = False

    def __getitem__(self, note: int) -> Wavetable:
        return self._wavetables[note]

    def __len__(self) -> int:
        return 128


_BANK_CACHE: dict[float, WavetableBank] = {}


def get_bank(sample_rate: float) -> WavetableBank:
    """Banks are deterministic per sample rate, so share one per process."""
    bank = _BANK_CACHE.get(sample_rate)
    if bank is None:
        bank = _BANK_CACHE[sample_rate] = WavetableBank(sample_rate)
    return bank


def table_read(table, phase):
    """Linear-interpolated lookup at phase in [0, 1), wrapping at the end."""
    samples = table.samples if isinstance(table, Wavetable) else table
    n = samples.shape[0]
    pos = np.asarray(phase, dtype=np.float64) * n
    i0 = pos.astype(np.int64) % n
    frac = pos - np.floor(pos)
    i1 = (i0 + 1) % n
    out = samples[i0] + (samples[i1] - samples[i0]) * frac
    return float(out) if np.isscalar(phase) else out


def pwm_wobble(t):
    """Slow pulse-width drift around 0.5: 0.5 + 0.01*sin(2*pi*0.5*t)."""
    return 0.5 + 0.01 * np.sin(2.0 * np.pi * 0.5 * t)


class MorphOsc:
    """Single oscillator morphing saw -> pulse from one note's table.

    The pulse is the difference of two table reads pw apart plus the
    2*pw-1 level shift, so pulse width works without a second table bank.
    """

    def __init__(self, bank: WavetableBank, note: int, sample_rate: float):
        self.table = bank.tables[note]
        self.sample_rate = sample_rate
        self.phase = 0.0

    def tick(self, freq: float, shape: float, pw: float) -> float:
        if freq <= 0:
            raise ValueError("frequency must be positive")
        pw = min(max(pw, PW_MIN), PW_MAX)
        tbl = self.table
        n = tbl.shape[0]
        ph = self.phase
        pos = ph * n
        i0 = int(pos)
        fr = pos - i0
        i1 = i0 + 1
        if i1 == n:
            i1 = 0
        saw = tbl[i0] + (tbl[i1] - tbl[i0]) * fr
        ph2 = ph + pw
        ph2 -= math.floor(ph2)
        pos2 = ph2 * n
        j0 = int(pos2)
        fr2 = pos2 - j0
        j1 = j0 + 1
        if j1 == n:
            j1 = 0
        shifted = tbl[j0] + (tbl[j1] - tbl[j0]) * fr2
        pulse = saw - shifted + (2.0 * pw - 1.0)
        out = (1.0 - shape) * saw + shape * pulse
        ph += freq / self.sample_rate
        self.phase = ph - math.floor(ph)
        return out

    def render(self, n: int, freq: float, shape: float, pw: float) -> np.ndarray:
        out = np.empty(n)
        for i in range(n):
            out[i] = self.tick(freq, shape, pw)
        return out


def voice_frequency_multipliers(detune):
    """Per-voice frequency ratios of the 8-voice stack at a detune amount."""
    return SUPERSAW_DETUNE * detune + 1.0


def stereo_weights(width):
    """Left weights of the 8 voices; right weights are their complement."""
    w = np.clip(SUPERSAW_PAN * width + 0.5, 0.0, 1.0)
    return w, 1.0 - w


class SuperOsc:
    """8 detuned morph oscillators mixed with fixed stereo placements.

    Detune and width scale fixed per-voice constants, so one knob each
    controls the whole stack. Pulse width wobbles slowly on its own.
    """

    def __init__(self, bank: WavetableBank, sample_rate: float, phases=None):
        self.bank = bank
        self.sample_rate = sample_rate
        self.phases = np.zeros(8) if phases is None else np.asarray(phases, dtype=np.float64).copy()
        self._sample_pos = 0  # drives the pulse-width wobble clock
        self._voices = np.empty((8, CONTROL_BLOCK))
        self._incs = np.empty(8)

    def render(self, n, freq, shape, detune, width, vol, note):
        """Stereo render; control values (pw, weights) update per control block."""
        if freq <= 0:
            raise ValueError("frequency must be positive")
        vol = min(max(vol, 0.0), 1.0)
        wl, wr = stereo_weights(width)
        tbl = self.bank.tables[note]
        np.multiply(voice_frequency_multipliers(detune), freq / self.sample_rate, out=self._incs)
        outl = np.empty(n)
        outr = np.empty(n)
        done = 0
        while done < n:
            nb = min(CONTROL_BLOCK, n - done)
            pw = float(pwm_wobble(self._sample_pos / self.sample_rate))
            pw = min(max(pw, PW_MIN), PW_MAX)
            block = self._voices[:, :nb]
            kernels.supersaw_voices_block(tbl, self.phases, self._incs, shape, pw, block)
            outl[done : done + nb] = (0.125 * vol) * (wl @ block)
            outr[done : done + nb] = (0.125 * vol) * (wr @ block)
            self._sample_pos += nb
            done += nb
        return outl, outr

    def render_voices(self, n, freq, shape, detune, note):
        """Unmixed per-voice streams (8, n); used to verify the stack."""
        tbl = self.bank.tables[note]
        np.multiply(voice_frequency_multipliers(detune), freq / self.sample_rate, out=self._incs)
        out = np.empty((8, n))
        done = 0
        while done < n:
            nb = min(CONTROL_BLOCK, n - done)
            pw = float(pwm_wobble(self._sample_pos / self.sample_rate))
            pw = min(max(pw, PW_MIN), PW_MAX)
            kernels.supersaw_voices_block(
                tbl, self.phases, self._incs, shape, pw, out[:, done : done + nb]
            )
            self._sample_pos += nb
            done += nb
        return out

    def tick(self, freq, shape, detune, width, vol, note):
        l, r = self.render(1, freq, shape, detune, width, vol, note)
        return float(l[0]), float(r[0])
