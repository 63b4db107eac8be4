"""Send effects shared by both instruments: feedback delay and a
Schroeder reverberator."""

from __future__ import annotations

import numpy as np

from . import kernels

MAX_DELAY_SECONDS = 5.0

COMB_DELAYS_MS = (29.7, 37.1, 41.1, 43.7)
ALLPASS_DELAYS_MS = (5.0, 1.7)
ALLPASS_GAIN = 0.7


class FeedbackDelay:
    """wet[n] = in[n-T] + feedback*wet[n-T]; out = (1-mix)*in + mix*wet."""

    def __init__(self, sample_rate: int, max_time: float = MAX_DELAY_SECONDS):
        self.sample_rate = sample_rate
        self.max_time = max_time
        self._ring = np.zeros((2, int(max_time * sample_rate) + 1))
        self._widx = np.zeros(1, dtype=np.int64)

    def process_into(self, inl, inr, outl, outr, time, feedback, mix):
        if not 0.0 < time <= self.max_time:
            raise ValueError(f"delay time must be in (0, {self.max_time}] s")
        feedback = min(max(feedback, 0.0), 0.999)  # keep the loop stable
        mix = min(max(mix, 0.0), 1.0)
        dsamp = max(1, round(time * self.sample_rate))
        kernels.delay_block(inl, inr, outl, outr, self._ring, self._widx, dsamp, feedback, mix)

    def process(self, inl, inr, time, feedback, mix):
        outl = np.empty_like(inl)
        outr = np.empty_like(inr)
        self.process_into(
            np.asarray(inl, dtype=np.float64),
            np.asarray(inr, dtype=np.float64),
            outl,
            outr,
            time,
            feedback,
            mix,
        )
        return outl, outr

    def clear(self):
        self._ring[:] = 0.0
        self._widx[0] = 0


class SchroederReverb:
    """Four parallel feedback combs into two series allpasses per channel.

    Comb feedback is tuned so the tail decays 60 dB over
    RT60 = 0.5 + 4.5*room seconds.
    """

    def __init__(self, sample_rate: int):
        self.sample_rate = sample_rate
        self._comb_len = np.array(
            [max(1, round(ms * 1e-3 * sample_rate)) for ms in COMB_DELAYS_MS], dtype=np.int64
        )
        self._combs = np.zeros((2, len(COMB_DELAYS_MS), int(self._comb_len.max())))
        self._comb_idx = np.zeros((2, len(COMB_DELAYS_MS)), dtype=np.int64)
        self._comb_g = np.zeros(len(COMB_DELAYS_MS))
        self._ap_len = np.array(
            [max(1, round(ms * 1e-3 * sample_rate)) for ms in ALLPASS_DELAYS_MS], dtype=np.int64
        )
        self._aps = np.zeros((2, len(ALLPASS_DELAYS_MS), int(self._ap_len.max())))
        self._ap_idx = np.zeros((2, len(ALLPASS_DELAYS_MS)), dtype=np.int64)

    @staticmethod
    def rt60(room: float) -> float:
        return 0.5 + 4.5 * min(max(room, 0.0), 1.0)

    def process_into(self, inl, inr, outl, outr, room, mix):
        t60 = self.rt60(room)
        np.power(10.0, -3.0 * (self._comb_len / self.sample_rate) / t60, out=self._comb_g)
        mix = min(max(mix, 0.0), 1.0)
        kernels.reverb_block(
            inl,
            inr,
            outl,
            outr,
            self._combs,
            self._comb_idx,
            self._comb_len,
            self._comb_g,
            self._aps,
            self._ap_idx,
            self._ap_len,
            ALLPASS_GAIN,
            mix,
        )

    def process(self, inl, inr, room, mix):
        outl = np.empty_like(inl)
        outr = np.empty_like(inr)
        self.process_into(
            np.asarray(inl, dtype=np.float64),
            np.asarray(inr, dtype=np.float64),
            outl,
            outr,
            room,
            mix,
        )
        return outl, outr

    def clear(self):
        self._combs[:] = 0.0
        self._aps[:] = 0.0
        self._comb_idx[:] = 0
        self._ap_idx[:] = 0
