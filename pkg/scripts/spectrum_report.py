#!/usr/bin/env python3
"""Plot spectra of the factory drone presets (sanity view for preset work).

Writes spectrum_<preset>.png next to the working directory.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.signal import welch

from wintersynth.presets import factory_presets
from wintersynth.render import build_engine

SR = 48000


def main() -> int:
    seconds = float(sys.argv[1]) if len(sys.argv) > 1 else 8.0
    for name, preset in factory_presets().items():
        if preset.engine != "wintermute":
            continue
        engine = build_engine(preset, SR, seed=1)
        block = engine.render(int(SR * seconds))
        freqs, psd = welch(block.left + block.right, fs=SR, nperseg=16384)
        fig, ax = plt.subplots(figsize=(9, 4))
        ax.semilogx(freqs[1:], 10 * np.log10(psd[1:] + 1e-30))
        ax.set_xlim(20, SR / 2)
        ax.set_xlabel("Hz")
        ax.set_ylabel("dB/Hz")
        ax.set_title(f"{name} ({seconds:.0f} s, seed 1)")
        ax.grid(True, which="both", alpha=0.3)
        out = f"spectrum_{name.replace(' ', '_')}.png"
        fig.tight_layout()
        fig.savefig(out, dpi=110)
        plt.close(fig)
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
