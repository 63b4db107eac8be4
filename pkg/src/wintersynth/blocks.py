"""Sample buffers, control-rate constants and the seeded random stream."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Modulators and parameters update once per control block; audio-rate paths
# (oscillators, filters, pan application) run per sample.
CONTROL_BLOCK = 16

# Shortest interval the trigger scheduler will produce.
MIN_TRIGGER_INTERVAL = 1e-3


@dataclass
class AudioBlock:
    """Non-interleaved stereo buffer. Both channels share one sample rate."""

    left: np.ndarray
    right: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ValueError("channel length mismatch")

    @property
    def n_frames(self) -> int:
        return self.left.shape[0]

    @property
    def duration(self) -> float:
        return self.n_frames / self.sample_rate

    def validate_finite(self) -> "AudioBlock":
        if not (np.isfinite(self.left).all() and np.isfinite(self.right).all()):
            raise FloatingPointError("non-finite samples in audio block")
        return self

    def rms(self) -> tuple[float, float]:
        return (
            float(np.sqrt(np.mean(np.square(self.left)))),
            float(np.sqrt(np.mean(np.square(self.right)))),
        )

    def peak(self) -> tuple[float, float]:
        return (
            float(np.max(np.abs(self.left), initial=0.0)),
            float(np.max(np.abs(self.right), initial=0.0)),
        )

    @classmethod
    def silence(cls, n_frames: int, sample_rate: int) -> "AudioBlock":
        return cls(
            np.zeros(n_frames, dtype=np.float64),
            np.zeros(n_frames, dtype=np.float64),
            sample_rate,
        )


@dataclass
class RngStream:
    """Seeded PCG64 stream; a given seed yields the same draw sequence on
    every platform, which makes whole renders reproducible."""

    seed: int
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, lo: float, hi: float, size=None):
        return self.gen.uniform(lo, hi, size)

    def normal(self, size=None):
        return self.gen.standard_normal(size)

    def fill_uniform01(self, out: np.ndarray) -> None:
        # in-place draw, no allocation in the render path
        self.gen.random(out=out)

    def fill_normal(self, out: np.ndarray) -> None:
        self.gen.standard_normal(out=out)
