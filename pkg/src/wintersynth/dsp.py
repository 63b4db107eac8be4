"""Shared unit generators: noise, random triggers, smoothers, LFO,
resonant bandpass, retriggerable envelope and equal-power panning."""

from __future__ import annotations

import math

import numpy as np

from .blocks import MIN_TRIGGER_INTERVAL, RngStream
from . import kernels


def white_noise(rng: RngStream, n: int) -> np.ndarray:
    """n uniform samples in [-1, 1]."""
    if n <= 0:
        raise ValueError("sample count must be positive")
    return rng.uniform(-1.0, 1.0, n)


def gauss_interval(g, avg_rate, dev):
    """Interval law for gaussian retriggering: (1 + dev*g)/rate, floored at
    1 ms. dev=0 degenerates to a strictly periodic 1/rate."""
    return np.maximum(MIN_TRIGGER_INTERVAL, (1.0 + dev * g) / avg_rate)


def gauss_trigger_next(rng: RngStream, avg_rate: float, dev: float) -> float:
    """Next retrigger interval in seconds for an average rate in Hz."""
    if avg_rate <= 0:
        raise ValueError("avg_rate must be positive")
    if dev < 0:
        raise ValueError("dev must be non-negative")
    return float(gauss_interval(rng.normal(), avg_rate, dev))


def one_pole_coeffs(cutoff: float, update_rate: float) -> tuple[float, float]:
    """(c1, c2) of y[n] = c1*x + c2*y[n-1]; cutoff clamped below Nyquist."""
    nyq = 0.5 * update_rate
    cutoff = min(max(cutoff, 0.0), nyq - 1e-6 * update_rate)
    b = 2.0 - math.cos(2.0 * math.pi * cutoff / update_rate)
    c2 = b - math.sqrt(b * b - 1.0)
    return 1.0 - c2, c2


class OnePoleSmoother:
    """One-pole lowpass on a control signal (DC gain 1, cutoff 0 freezes)."""

    def __init__(self, cutoff: float, update_rate: float, initial: float = 0.0):
        if cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        self.update_rate = update_rate
        self.y = initial
        self.set_cutoff(cutoff)

    def set_cutoff(self, cutoff: float) -> None:
        self.c1, self.c2 = one_pole_coeffs(cutoff, self.update_rate)

    def tick(self, x: float) -> float:
        self.y = self.c1 * x + self.c2 * self.y
        return self.y


class SampleHoldRandom:
    """Holds a uniform draw in [lo, hi], redrawing every 1/rate seconds.
    rate=0 keeps the initial draw forever."""

    def __init__(self, rng: RngStream, lo: float, hi: float, rate: float):
        if lo > hi:
            raise ValueError("lo must not exceed hi")
        if rate < 0:
            raise ValueError("rate must be non-negative")
        self.rng = rng
        self.lo = lo
        self.hi = hi
        self.rate = rate
        self.value = float(rng.uniform(lo, hi))
        self._boundary = 1  # next redraw happens at _boundary/rate

    def value_at(self, t: float) -> float:
        if self.rate > 0:
            while t >= self._boundary / self.rate:
                self.value = float(self.rng.uniform(self.lo, self.hi))
                self._boundary += 1
        return self.value


def unipolar_sine_lfo(rate: float, phase0: float, t) -> float:
    """0.5*(1 + sin(2*pi*(rate*t + phase0))); unipolar so sqrt(pan) works."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    return 0.5 * (1.0 + np.sin(2.0 * np.pi * (rate * t + phase0)))


def reson_coeffs(cf, bw, sample_rate):
    """Two-pole bandpass coefficients with unit peak gain.

    c3 = e^(-2*pi*bw/sr), c2 = (4*c3/(1+c3))*cos(2*pi*cf/sr),
    c1 = (1-c3)*sqrt(1 - c2^2/(4*c3)). Poles stay inside the unit circle
    for any cf in (0, sr/2) and bw > 0; asserted after computation.
    """
    c3 = np.exp(-2.0 * np.pi * bw / sample_rate)
    c2 = (4.0 * c3 / (1.0 + c3)) * np.cos(2.0 * np.pi * cf / sample_rate)
    c1 = (1.0 - c3) * np.sqrt(1.0 - c2 * c2 / (4.0 * c3))
    assert np.all(c3 < 1.0) and np.all(c2 * c2 < 4.0 * c3), "unstable resonator"
    return c1, c2, c3


class ResonantBandpass:
    """Cascade of two-pole bandpass stages (the drone voice uses 2)."""

    def __init__(self, sample_rate: float, stages: int = 2):
        if stages < 1:
            raise ValueError("need at least one stage")
        self.sample_rate = sample_rate
        self.state = np.zeros((stages, 2))
        self.clamped = False

    def process(self, block: np.ndarray, cf: float, bw: float) -> np.ndarray:
        if bw <= 0:
            raise ValueError("bandwidth must be positive")
        x = np.asarray(block, dtype=np.float64)
        if not np.isfinite(x).all():
            raise ValueError("non-finite input")
        lo, hi = 1e-3, 0.5 * self.sample_rate - 1e-3
        if not lo < cf < hi:
            cf = min(max(cf, lo), hi)
            self.clamped = True
        c1, c2, c3 = reson_coeffs(cf, bw, self.sample_rate)
        out = np.empty_like(x)
        kernels.reson_stages(x, c1, c2, c3, self.state, out)
        return out

    def clear(self) -> None:
        self.state[:] = 0.0


# retriggerable attack/decay envelope stages
ENV_IDLE = 0
ENV_ATTACK = 1
ENV_DECAY = 2
ENV_RELEASE = 3


class RetrigEnvelope:
    """Piecewise-linear attack/decay envelope that retriggers from its
    current level, so a retrigger never produces a discontinuity."""

    def __init__(self):
        self.level = 0.0
        self.stage = ENV_IDLE
        self.seg_t = 0.0
        self.start = 0.0
        self.target = 0.0
        self.att = 0.0
        self.dec = 0.0

    def trigger(self, level_max: float, att: float, dec: float) -> None:
        if att < 0 or dec < 0:
            raise ValueError("segment times must be non-negative")
        self.start = self.level  # capture, no jump on retrigger
        self.target = level_max
        self.att = att
        self.dec = dec
        self.seg_t = 0.0
        self.stage = ENV_ATTACK
        if att == 0.0:
            self.level = level_max
            self.stage = ENV_DECAY
            if dec == 0.0:
                self.level = 0.0
                self.stage = ENV_IDLE

    def note_off(self, release: float) -> None:
        if release < 0:
            raise ValueError("segment times must be non-negative")
        self.start = self.level
        self.dec = release
        self.seg_t = 0.0
        self.stage = ENV_RELEASE
        if release == 0.0:
            self.level = 0.0
            self.stage = ENV_IDLE

    def tick(self, dt: float) -> float:
        remaining = dt
        while remaining > 0.0 and self.stage != ENV_IDLE:
            if self.stage == ENV_ATTACK:
                seg_len = self.att
                if self.seg_t + remaining < seg_len:
                    self.seg_t += remaining
                    remaining = 0.0
                    self.level = self.start + (self.target - self.start) * (
                        self.seg_t / seg_len
                    )
                else:
                    remaining -= seg_len - self.seg_t
                    self.level = self.target
                    self.start = self.target
                    self.seg_t = 0.0
                    self.stage = ENV_DECAY
                    if self.dec == 0.0:
                        self.level = 0.0
                        self.stage = ENV_IDLE
            else:  # decay or release, both ramp toward zero
                seg_len = self.dec
                if self.seg_t + remaining < seg_len:
                    self.seg_t += remaining
                    remaining = 0.0
                    self.level = self.start * (1.0 - self.seg_t / seg_len)
                else:
                    remaining = 0.0 if seg_len == 0.0 else remaining - (seg_len - self.seg_t)
                    self.level = 0.0
                    self.seg_t = 0.0
                    self.stage = ENV_IDLE
        return self.level


def equal_power_pan(s, pos):
    """(L, R) = (s*sqrt(pos), s*sqrt(1-pos)); L^2 + R^2 == s^2."""
    pos = np.clip(pos, 0.0, 1.0)
    return s * np.sqrt(pos), s * np.sqrt(1.0 - pos)
