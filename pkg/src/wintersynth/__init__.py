"""Two-instrument software synth: an N-voice filtered-noise drone
generator and a supersaw polysynth, with a deterministic offline renderer
and a live control server."""

from .blocks import CONTROL_BLOCK, AudioBlock, RngStream
from .presets import Preset, factory_presets, load_preset, save_preset
from .render import render_block, render_offline
from .shadows import ShadowsEngine, ShadowsParams
from .wintermute import DroneParams, WintermuteEngine

__version__ = "0.1.0"

__all__ = [
    "AudioBlock",
    "CONTROL_BLOCK",
    "DroneParams",
    "Preset",
    "RngStream",
    "ShadowsEngine",
    "ShadowsParams",
    "WintermuteEngine",
    "factory_presets",
    "load_preset",
    "render_block",
    "render_offline",
    "save_preset",
    "__version__",
]
