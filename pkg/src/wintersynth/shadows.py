"""Polyphonic supersaw synth: MIDI-driven voices, dual bipolar-T envelopes,
4-pole resonant lowpass per voice, shared delay/reverb sends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import CONTROL_BLOCK, AudioBlock, RngStream
from .fx import FeedbackDelay, SchroederReverb
from .wavetable import (
    PW_MAX,
    PW_MIN,
    SUPERSAW_DETUNE,
    SUPERSAW_PAN,
    get_bank,
    midi_to_hz,
    pwm_wobble,
)
from .wintermute import FxParams
from . import kernels, registry

# 4th-order Butterworth Q pair; resonance raises the second stage's Q
BUTTERWORTH_Q = (0.5411961001461970, 1.3065629648763766)
RESONANCE_Q_SCALE = 9.0

ENV_KNOB_SCALE = 3.0  # knob -> seconds
ENV_KNOB_FLOOR = 0.001


@dataclass
class AdstrParams:
    """Envelope knobs, all 0..1 except the bipolar T segment.

    T ramps the sustain plateau: positive climbs to 1, negative decays to
    0 (ending the note), zero holds sustain like a plain ADSR.
    """

    attack: float = 0.01
    decay: float = 0.2
    sustain: float = 0.7
    t_time: float = 0.0
    release: float = 0.1

    def attack_seconds(self) -> float:
        return self.attack * ENV_KNOB_SCALE + ENV_KNOB_FLOOR

    def decay_seconds(self) -> float:
        return self.decay * ENV_KNOB_SCALE + ENV_KNOB_FLOOR

    def release_seconds(self) -> float:
        return self.release * ENV_KNOB_SCALE + ENV_KNOB_FLOOR

    def t_seconds(self) -> float:
        return abs(self.t_time) * ENV_KNOB_SCALE


# envelope stages
A_ATTACK = 1
A_DECAY = 2
A_TSEG = 3
A_HOLD = 4
A_RELEASE = 5
A_DONE = 0


class AdstrEnvelope:
    """Attack/decay/sustain/T/release state machine, level always in [0,1]
    and continuous across every transition including early note-off."""

    def __init__(self):
        self.level = 0.0
        self.stage = A_DONE
        self._seg_t = 0.0
        self._seg_len = 0.0
        self._seg_from = 0.0
        self._seg_to = 0.0
        self._sustain = 0.0
        self._t_sign = 0
        self._t_len = 0.0
        self._decay_len = 0.0
        self._release_len = 0.0

    def gate_on(self, params: AdstrParams) -> None:
        self.level = 0.0
        self._sustain = min(max(params.sustain, 0.0), 1.0)
        self._decay_len = params.decay_seconds()
        self._release_len = params.release_seconds()
        self._t_len = params.t_seconds()
        self._t_sign = 0 if params.t_time == 0 else (1 if params.t_time > 0 else -1)
        self._enter(A_ATTACK, params.attack_seconds(), 0.0, 1.0)

    def gate_off(self) -> None:
        if self.stage not in (A_DONE, A_RELEASE):
            self._enter(A_RELEASE, self._release_len, self.level, 0.0)

    def _enter(self, stage, seg_len, frm, to):
        self.stage = stage
        self._seg_len = seg_len
        self._seg_t = 0.0
        self._seg_from = frm
        self._seg_to = to
        if seg_len == 0.0:
            self.level = to
            self._next_stage()
        else:
            self.level = frm

    def _next_stage(self):
        if self.stage == A_ATTACK:
            self._enter(A_DECAY, self._decay_len, 1.0, self._sustain)
        elif self.stage == A_DECAY:
            if self._t_sign > 0:
                self._enter(A_TSEG, self._t_len, self._sustain, 1.0)
            elif self._t_sign < 0:
                self._enter(A_TSEG, self._t_len, self._sustain, 0.0)
            else:
                self.stage = A_HOLD
                self.level = self._sustain
        elif self.stage == A_TSEG:
            if self._t_sign > 0:
                self.stage = A_HOLD
                self.level = 1.0
            else:
                self.stage = A_DONE
                self.level = 0.0
        elif self.stage == A_RELEASE:
            self.stage = A_DONE
            self.level = 0.0

    def tick(self, dt: float) -> float:
        remaining = dt
        while remaining > 0.0 and self.stage not in (A_DONE, A_HOLD):
            left = self._seg_len - self._seg_t
            if remaining < left:
                self._seg_t += remaining
                remaining = 0.0
                frac = self._seg_t / self._seg_len
                self.level = self._seg_from + (self._seg_to - self._seg_from) * frac
            else:
                remaining -= left
                self.level = self._seg_to
                self._next_stage()
        return self.level

    @property
    def done(self) -> bool:
        return self.stage == A_DONE

    @property
    def releasing(self) -> bool:
        return self.stage == A_RELEASE


@dataclass
class ShadowsParams:
    shape: float = 0.0
    detune: float = 0.4
    width: float = 0.7
    volume: float = 0.8
    cutoff: float = 0.8
    resonance: float = 0.1
    filter_env: float = 0.3
    phase_spread: int = 0
    amp: AdstrParams = field(default_factory=AdstrParams)
    filter: AdstrParams = field(default_factory=AdstrParams)
    fx: FxParams = field(default_factory=FxParams)


PARAM_PATHS = {
    "shadows.shape": ("shape",),
    "shadows.detune": ("detune",),
    "shadows.width": ("width",),
    "shadows.volume": ("volume",),
    "shadows.cutoff": ("cutoff",),
    "shadows.resonance": ("resonance",),
    "shadows.filter_env": ("filter_env",),
    "shadows.phase_spread": ("phase_spread",),
    "shadows.delay_send": ("fx", "delay_send"),
    "shadows.delay_time": ("fx", "delay_time"),
    "shadows.delay_feedback": ("fx", "delay_feedback"),
    "shadows.reverb_send": ("fx", "reverb_send"),
    "shadows.reverb_room": ("fx", "reverb_room"),
}
for _env in ("amp", "filter"):
    for _f in ("attack", "decay", "sustain", "t_time", "release"):
        PARAM_PATHS[f"shadows.{_env}_{_f}"] = (_env, _f)


def cutoff_hz(knob: float, env_amount: float, env_level: float, sample_rate: float) -> float:
    """20 Hz..20 kHz exponential knob, +-5 octaves of envelope modulation."""
    hz = 20.0 * (1000.0 ** knob) * 2.0 ** (5.0 * env_amount * env_level)
    return min(max(hz, 20.0), 0.45 * sample_rate)


def lowpass_coeffs(fc: float, q: float, sample_rate: float):
    """RBJ lowpass biquad (b0, b1, b2, a1, a2), a0-normalized.
    Mirrors the in-kernel computation; tests hold them equal."""
    w0 = 2.0 * math.pi * fc / sample_rate
    cw = math.cos(w0)
    sw = math.sin(w0)
    alpha = sw / (2.0 * q)
    a0i = 1.0 / (1.0 + alpha)
    return (
        0.5 * (1.0 - cw) * a0i,
        (1.0 - cw) * a0i,
        0.5 * (1.0 - cw) * a0i,
        -2.0 * cw * a0i,
        (1.0 - alpha) * a0i,
    )


class _Voice:
    __slots__ = ("note", "velocity", "alloc_id", "amp_env", "fil_env", "active")

    def __init__(self):
        self.note = 0
        self.velocity = 0.0
        self.alloc_id = -1
        self.amp_env = AdstrEnvelope()
        self.fil_env = AdstrEnvelope()
        self.active = False


class ShadowsEngine:
    """Render engine for the supersaw polysynth.

    Note events are quantized to control-block boundaries; callers apply
    them between render_into() calls (the offline renderer slices its
    buffer at event times). Voice stealing prefers the oldest releasing
    voice, then the oldest outright.
    """

    name = "shadows"

    def __init__(
        self,
        params: ShadowsParams | None = None,
        sample_rate: int = 48000,
        seed: int = 0,
        max_polyphony: int = 16,
    ):
        self.params = params or ShadowsParams()
        self.sample_rate = sample_rate
        self.seed = seed
        self.rng = RngStream(seed)
        self.bank = get_bank(sample_rate)
        self.max_polyphony = max_polyphony
        self.voices = [_Voice() for _ in range(max_polyphony)]
        self._alloc_counter = 0
        n = max_polyphony
        self._active = np.zeros(n, dtype=np.uint8)
        self._notes = np.zeros(n, dtype=np.int64)
        self._f0 = np.zeros(n)
        self._phases = np.zeros((n, 8))
        self._incs = np.zeros((n, 8))
        self._cutoff = np.full(n, 1000.0)
        self._post = np.zeros(n)
        self._fstate = np.zeros((n, 2, 2, 2))
        self._wl = np.zeros(8)
        self._wr = np.zeros(8)
        self._mult = np.zeros(8)
        self._sample_pos = 0
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

    # -- note handling -------------------------------------------------------

    def note_on(self, note: int, velocity: float) -> bool:
        if not 0 <= note <= 127:
            raise ValueError("note out of MIDI range")
        if not 0.0 < velocity <= 1.0:
            raise ValueError("velocity must be in (0, 1]")
        slot = None
        for i, v in enumerate(self.voices):
            if not v.active:
                slot = i
                break
        if slot is None:
            releasing = [i for i, v in enumerate(self.voices) if v.amp_env.releasing]
            pool = releasing if releasing else range(len(self.voices))
            slot = min(pool, key=lambda i: self.voices[i].alloc_id)
        v = self.voices[slot]
        v.note = note
        v.velocity = velocity
        v.alloc_id = self._alloc_counter
        self._alloc_counter += 1
        v.active = True
        v.amp_env.gate_on(self.params.amp)
        v.fil_env.gate_on(self.params.filter)
        if self.params.phase_spread:
            self.rng.fill_uniform01(self._phases[slot])
        else:
            self._phases[slot, :] = 0.0
        self._fstate[slot] = 0.0
        self._active[slot] = 1
        self._notes[slot] = note
        self._f0[slot] = midi_to_hz(note)
        return True

    def note_off(self, note: int) -> bool:
        hit = False
        for v in self.voices:
            if v.active and v.note == note and not v.amp_env.releasing:
                v.amp_env.gate_off()
                v.fil_env.gate_off()
                hit = True
        return hit

    def all_notes_off(self) -> None:
        for v in self.voices:
            if v.active:
                v.amp_env.gate_off()
                v.fil_env.gate_off()

    @property
    def active_voice_count(self) -> int:
        return sum(1 for v in self.voices if v.active)

    # -- rendering -----------------------------------------------------------

    def prepare(self, max_frames: int) -> None:
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
        sr = float(self.sample_rate)
        dt = CONTROL_BLOCK / sr
        q1 = BUTTERWORTH_Q[0]
        q2 = BUTTERWORTH_Q[1] * (1.0 + RESONANCE_Q_SCALE * p.resonance)
        vol = min(max(p.volume, 0.0), 1.0)
        np.multiply(SUPERSAW_PAN, p.width, out=self._wl)
        np.add(self._wl, 0.5, out=self._wl)
        np.clip(self._wl, 0.0, 1.0, out=self._wl)
        np.subtract(1.0, self._wl, out=self._wr)
        np.multiply(SUPERSAW_DETUNE, p.detune, out=self._mult)
        np.add(self._mult, 1.0, out=self._mult)
        for pos in range(0, n_frames, CONTROL_BLOCK):
            any_active = False
            for slot, v in enumerate(self.voices):
                if not v.active:
                    continue
                amp = v.amp_env.tick(dt)
                fil = v.fil_env.tick(dt)
                if v.amp_env.done:
                    v.active = False
                    self._active[slot] = 0
                    continue
                any_active = True
                self._post[slot] = amp * v.velocity
                self._cutoff[slot] = cutoff_hz(p.cutoff, p.filter_env, fil * v.velocity, sr)
            if any_active:
                pw = float(pwm_wobble(self._sample_pos / sr))
                pw = min(max(pw, PW_MIN), PW_MAX)
                np.multiply(self._f0[:, None], self._mult[None, :], out=self._incs)
                np.divide(self._incs, sr, out=self._incs)
                kernels.shadows_block(
                    self.bank.tables, self._active, self._notes,
                    self._phases, self._incs,
                    p.shape, pw, self._wl, self._wr, vol,
                    self._cutoff, q1, q2, self._post, self._fstate, sr,
                    outl[pos : pos + CONTROL_BLOCK], outr[pos : pos + CONTROL_BLOCK],
                )
            self._sample_pos += CONTROL_BLOCK
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
