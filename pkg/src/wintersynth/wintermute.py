"""The drone engine: N filtered-noise voices, gaussian retriggering,
per-voice drift/pan modulation, spectral tilt, shared delay/reverb sends."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blocks import CONTROL_BLOCK, AudioBlock, RngStream
from .dsp import one_pole_coeffs
from .fx import FeedbackDelay, SchroederReverb
from . import kernels, registry


@dataclass
class FxParams:
    delay_send: float = 0.0
    delay_time: float = 0.5
    delay_feedback: float = 0.4
    reverb_send: float = 0.0
    reverb_room: float = 0.5


@dataclass
class DroneParams:
    fundamental: float = 55.0
    offset: float = 0.0
    spread: float = 1.0
    n_voices: int = 96
    avg_rate: float = 2.0
    dev: float = 0.5
    att: float = 0.5
    dec: float = 1.0
    amp_rand: float = 0.3
    env_pitch_mod: float = 0.0
    drift_amt: float = 0.1
    drift_rate: float = 1.0
    resonance: float = 40.0
    pan_rate: float = 0.2
    damp: float = 0.0
    fx: FxParams = field(default_factory=FxParams)


# The per-voice tilt law carries a 0.001 base weight calibrated against a
# full-scale integer noise source; with unit-amplitude noise the mix bus
# needs the inverse makeup gain to land presets at practical levels.
DRONE_MIX_GAIN = 1000.0

PARAM_PATHS = {
    "wintermute.fundamental": ("fundamental",),
    "wintermute.offset": ("offset",),
    "wintermute.spread": ("spread",),
    "wintermute.n_voices": ("n_voices",),
    "wintermute.avg_rate": ("avg_rate",),
    "wintermute.dev": ("dev",),
    "wintermute.att": ("att",),
    "wintermute.dec": ("dec",),
    "wintermute.amp_rand": ("amp_rand",),
    "wintermute.env_pitch_mod": ("env_pitch_mod",),
    "wintermute.drift_amt": ("drift_amt",),
    "wintermute.drift_rate": ("drift_rate",),
    "wintermute.resonance": ("resonance",),
    "wintermute.pan_rate": ("pan_rate",),
    "wintermute.damp": ("damp",),
    "wintermute.delay_send": ("fx", "delay_send"),
    "wintermute.delay_time": ("fx", "delay_time"),
    "wintermute.delay_feedback": ("fx", "delay_feedback"),
    "wintermute.reverb_send": ("fx", "reverb_send"),
    "wintermute.reverb_room": ("fx", "reverb_room"),
}


def voice_center_freq(params: DroneParams, index: int, sample_rate: float) -> float:
    """f = fundamental * (index*spread + offset), clamped to [1, 0.45*sr].
    spread=1, offset=0 puts voice k exactly on harmonic k."""
    f = params.fundamental * (index * params.spread + params.offset)
    return min(max(f, 1.0), 0.45 * sample_rate)


def voice_tilt_gain(params: DroneParams, index: int) -> float:
    """0.001 * (1 + damp*(index - N/2)/N): damp tilts level across voices."""
    n = params.n_voices
    return 0.001 * (1.0 + params.damp * (index - n * 0.5) / n)


class WintermuteEngine:
    """Render engine for the drone instrument.

    All stochastic state is driven by one seeded stream, so renders are
    reproducible. Per-block state lives in flat arrays; the jitted kernels
    advance it without allocating, which keeps render_into() safe to call
    from an audio callback once prepare() has sized the scratch buffers.
    """

    name = "wintermute"
    MAX_VOICES = 96

    def __init__(self, params: DroneParams | None = None, sample_rate: int = 48000, seed: int = 0):
        self.params = params or DroneParams()
        self.sample_rate = sample_rate
        self.seed = seed
        self.rng = RngStream(seed)
        n = max(self.MAX_VOICES, self.params.n_voices)
        self._alloc = n
        self._idx = np.arange(1, n + 1, dtype=np.float64)
        self._stage = np.zeros(n, dtype=np.int8)
        self._seg_t = np.zeros(n)
        self._start = np.zeros(n)
        self._target = np.zeros(n)
        self._att = np.zeros(n)
        self._dec = np.zeros(n)
        self._level = np.zeros(n)
        self._next_trig = np.zeros(n)  # every voice fires immediately
        self._drift = np.zeros(n)
        self._jit = self.rng.uniform(0.9, 1.1, n)
        self._jit_boundary = np.ones(n)
        self._lfo_phase = self.rng.uniform(0.0, 1.0, n)
        self._fstate = np.zeros((n, 4))
        self._stab_flag = np.zeros(1, dtype=np.int64)
        self.trigger_count = np.zeros(1, dtype=np.int64)
        self._u_level = np.zeros(n)
        self._g_trig = np.zeros(n)
        self._u_drift = np.zeros(n)
        self._u_jit = np.zeros(n)
        self._noise = np.zeros(CONTROL_BLOCK)
        self._block_count = 0
        self._delay = FeedbackDelay(sample_rate)
        self._reverb = SchroederReverb(sample_rate)
        self._sendl = self._sendr = self._wetl = self._wetr = None
        self.prepare(CONTROL_BLOCK)

    # -- parameter plumbing ------------------------------------------------

    def param_ids(self):
        return list(PARAM_PATHS)

    def set_param(self, pid: str, value: float) -> float:
        d = registry.descriptor(pid)
        value = d.clamp(value)
        path = PARAM_PATHS[pid]
        obj = self.params
        for attr in path[:-1]:
            obj = getattr(obj, attr)
        setattr(obj, path[-1], int(value) if d.integer else value)
        return value

    def get_param(self, pid: str) -> float:
        obj = self.params
        for attr in PARAM_PATHS[pid][:-1]:
            obj = getattr(obj, attr)
        return float(getattr(obj, PARAM_PATHS[pid][-1]))

    def note_on(self, note: int, velocity: float) -> bool:
        return False  # drone has no note input

    def note_off(self, note: int) -> bool:
        return False

    @property
    def active_voice_count(self) -> int:
        return min(self.params.n_voices, self._alloc)

    # -- rendering -----------------------------------------------------------

    def prepare(self, max_frames: int) -> None:
        """Size the FX scratch buffers; call before real-time use."""
        if self._sendl is None or self._sendl.shape[0] < max_frames:
            self._sendl = np.zeros(max_frames)
            self._sendr = np.zeros(max_frames)
            self._wetl = np.zeros(max_frames)
            self._wetr = np.zeros(max_frames)

    def render_into(self, outl: np.ndarray, outr: np.ndarray) -> None:
        n_frames = outl.shape[0]
        if n_frames % CONTROL_BLOCK:
            raise ValueError("frame count must be a multiple of the control block")
        self.prepare(n_frames)
        outl[:] = 0.0
        outr[:] = 0.0
        p = self.params
        n = min(max(p.n_voices, 0), self._alloc)
        sr = float(self.sample_rate)
        dt = CONTROL_BLOCK / sr
        control_rate = sr / CONTROL_BLOCK
        drift_c1, drift_c2 = one_pole_coeffs(p.drift_rate, control_rate)
        rate_per_voice = p.avg_rate / n if n else 1.0
        jit_rate = p.pan_rate * 0.3
        if n:
            for pos in range(0, n_frames, CONTROL_BLOCK):
                t = self._block_count * dt
                self.rng.fill_uniform01(self._u_level[:n])
                self.rng.fill_normal(self._g_trig[:n])
                self.rng.fill_uniform01(self._u_drift[:n])
                self.rng.fill_uniform01(self._u_jit[:n])
                kernels.drone_control_block(
                    t, dt,
                    self._u_level[:n], self._g_trig[:n], self._u_drift[:n], self._u_jit[:n],
                    self._stage[:n], self._seg_t[:n], self._start[:n], self._target[:n],
                    self._att[:n], self._dec[:n], self._level[:n], self._next_trig[:n],
                    self._drift[:n], self._jit[:n], self._jit_boundary[:n], self._lfo_phase[:n],
                    p.att, p.dec, p.amp_rand, rate_per_voice, p.dev,
                    p.drift_amt, drift_c1, drift_c2, p.pan_rate, jit_rate,
                    self.trigger_count,
                )
                self.rng.fill_uniform01(self._noise)
                np.multiply(self._noise, 2.0, out=self._noise)
                np.subtract(self._noise, 1.0, out=self._noise)
                kernels.drone_block(
                    self._noise,
                    self._level[:n], self._drift[:n], self._lfo_phase[:n], self._idx[:n],
                    float(n), p.fundamental, p.spread, p.offset,
                    p.env_pitch_mod, p.resonance, p.damp, sr,
                    self._fstate[:n], self._stab_flag,
                    outl[pos : pos + CONTROL_BLOCK], outr[pos : pos + CONTROL_BLOCK],
                )
                self._block_count += 1
        else:
            self._block_count += n_frames // CONTROL_BLOCK
        if self._stab_flag[0]:
            raise AssertionError("resonator coefficients left the stable region")
        np.multiply(outl, DRONE_MIX_GAIN, out=outl)
        np.multiply(outr, DRONE_MIX_GAIN, out=outr)
        self._apply_fx(outl, outr, n_frames)

    def _apply_fx(self, outl, outr, n_frames):
        fxp = self.params.fx
        if fxp.delay_send > 0.0:
            np.multiply(outl, fxp.delay_send, out=self._sendl[:n_frames])
            np.multiply(outr, fxp.delay_send, out=self._sendr[:n_frames])
            self._delay.process_into(
                self._sendl[:n_frames], self._sendr[:n_frames],
                self._wetl[:n_frames], self._wetr[:n_frames],
                fxp.delay_time, fxp.delay_feedback, 1.0,
            )
            np.add(outl, self._wetl[:n_frames], out=outl)
            np.add(outr, self._wetr[:n_frames], out=outr)
        if fxp.reverb_send > 0.0:
            np.multiply(outl, fxp.reverb_send, out=self._sendl[:n_frames])
            np.multiply(outr, fxp.reverb_send, out=self._sendr[:n_frames])
            self._reverb.process_into(
                self._sendl[:n_frames], self._sendr[:n_frames],
                self._wetl[:n_frames], self._wetr[:n_frames],
                fxp.reverb_room, 1.0,
            )
            np.add(outl, self._wetl[:n_frames], out=outl)
            np.add(outr, self._wetr[:n_frames], out=outr)

    def render(self, n_frames: int) -> AudioBlock:
        padded = -(-n_frames // CONTROL_BLOCK) * CONTROL_BLOCK
        outl = np.zeros(padded)
        outr = np.zeros(padded)
        self.render_into(outl, outr)
        return AudioBlock(outl[:n_frames], outr[:n_frames], self.sample_rate).validate_finite()
