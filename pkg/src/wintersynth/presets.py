"""Preset documents: versioned JSON maps of parameter id -> value, plus
the shipped factory presets for both instruments."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

from . import registry

FORMAT_VERSION = 1


class PresetError(Exception):
    pass


@dataclass
class Preset:
    engine: str
    name: str
    params: dict[str, float] = field(default_factory=dict)
    seed: int | None = None
    format_version: int = FORMAT_VERSION


def save_preset(preset: Preset) -> dict:
    return {
        "format": preset.format_version,
        "engine": preset.engine,
        "name": preset.name,
        "seed": preset.seed,
        "params": {k: preset.params[k] for k in sorted(preset.params)},
    }


def preset_to_json(preset: Preset) -> str:
    return json.dumps(save_preset(preset), indent=2) + "\n"


def load_preset(document) -> Preset:
    """Parse and validate a preset document (dict or JSON text).

    Unknown parameter ids are rejected by name; out-of-range values are
    clamped with a warning.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise PresetError(f"malformed preset document: {e}") from None
    if not isinstance(document, dict):
        raise PresetError("preset document must be a JSON object")
    fmt = document.get("format")
    if fmt != FORMAT_VERSION:
        raise PresetError(f"unsupported preset format {fmt!r} (expected {FORMAT_VERSION})")
    engine = document.get("engine")
    if engine not in registry.ENGINES:
        raise PresetError(f"unknown engine {engine!r}")
    raw = document.get("params", {})
    if not isinstance(raw, dict):
        raise PresetError("params must be an object")
    known = set(registry.param_ids(engine))
    unknown = sorted(set(raw) - known)
    if unknown:
        raise PresetError(f"unknown parameter ids: {', '.join(unknown)}")
    params = {}
    for pid, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise PresetError(f"parameter {pid} has non-numeric value {value!r}")
        d = registry.descriptor(pid)
        clamped = d.clamp(value)
        if clamped != float(value):
            warnings.warn(f"{pid}={value} outside [{d.lo}, {d.hi}], clamped to {clamped}")
        params[pid] = clamped
    seed = document.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise PresetError("seed must be an integer or null")
    name = document.get("name", "")
    return Preset(engine=engine, name=name, params=params, seed=seed)


def apply_preset(engine_obj, preset: Preset) -> None:
    if preset.engine != engine_obj.name:
        raise PresetError(
            f"preset targets {preset.engine!r} but engine is {engine_obj.name!r}"
        )
    for pid, value in preset.params.items():
        engine_obj.set_param(pid, value)


def _wm(name, **kv):
    params = {f"wintermute.{k}": float(v) for k, v in kv.items()}
    return Preset(engine="wintermute", name=name, params=params)


def _sh(name, **kv):
    params = {f"shadows.{k}": float(v) for k, v in kv.items()}
    return Preset(engine="shadows", name=name, params=params)


def factory_presets() -> dict[str, Preset]:
    """Shipped presets; the four drone patches follow the classic recipes
    (bird calls, boiling liquid, tunnel drips, dark ambient bed)."""
    presets = [
        _wm(
            "birds",
            n_voices=6,
            fundamental=1100.0,
            spread=1.0,
            offset=0.0,
            avg_rate=1.2,
            dev=0.8,
            att=0.004,
            dec=0.16,
            amp_rand=0.55,
            env_pitch_mod=14.0,
            drift_amt=0.4,
            drift_rate=6.0,
            resonance=320.0,
            pan_rate=0.35,
            damp=0.0,
            delay_send=0.0,
            reverb_send=0.28,
            reverb_room=0.45,
        ),
        _wm(
            "bubbles",
            n_voices=96,
            fundamental=220.0,
            spread=0.08,
            offset=2.0,
            avg_rate=30.0,
            dev=0.7,
            att=0.003,
            dec=0.07,
            amp_rand=0.6,
            env_pitch_mod=4.0,
            drift_amt=0.15,
            drift_rate=3.0,
            resonance=130.0,
            pan_rate=0.6,
            damp=-0.2,
            delay_send=0.0,
            reverb_send=0.12,
            reverb_room=0.35,
        ),
        _wm(
            "drips",
            n_voices=12,
            fundamental=760.0,
            spread=1.13,
            offset=0.4,
            avg_rate=4.0,
            dev=0.9,
            att=0.002,
            dec=0.12,
            amp_rand=0.5,
            env_pitch_mod=9.0,
            drift_amt=0.25,
            drift_rate=8.0,
            resonance=420.0,
            pan_rate=0.5,
            damp=0.0,
            delay_send=0.15,
            delay_time=0.31,
            delay_feedback=0.35,
            reverb_send=0.85,
            reverb_room=0.8,
        ),
        _wm(
            "dark ambient",
            n_voices=48,
            fundamental=50.0,
            spread=1.0,
            offset=0.0,
            avg_rate=0.8,
            dev=0.6,
            att=3.0,
            dec=4.0,
            amp_rand=0.4,
            env_pitch_mod=0.0,
            drift_amt=0.3,
            drift_rate=0.2,
            resonance=25.0,
            pan_rate=0.08,
            damp=0.35,
            delay_send=0.4,
            delay_time=0.9,
            delay_feedback=0.5,
            reverb_send=0.55,
            reverb_room=0.85,
        ),
        _sh(
            "trance lead",
            shape=0.15,
            detune=0.55,
            width=0.9,
            volume=0.8,
            cutoff=0.75,
            resonance=0.25,
            filter_env=0.45,
            amp_attack=0.002,
            amp_decay=0.08,
            amp_sustain=0.7,
            amp_t_time=0.0,
            amp_release=0.12,
            filter_attack=0.001,
            filter_decay=0.15,
            filter_sustain=0.35,
            filter_t_time=-0.2,
            filter_release=0.1,
            delay_send=0.35,
            delay_time=0.375,
            delay_feedback=0.45,
            reverb_send=0.25,
            reverb_room=0.6,
        ),
        _sh(
            "witch house bass",
            shape=0.6,
            detune=0.3,
            width=0.4,
            volume=0.9,
            cutoff=0.38,
            resonance=0.3,
            filter_env=0.5,
            amp_attack=0.004,
            amp_decay=0.2,
            amp_sustain=0.85,
            amp_t_time=-0.4,
            amp_release=0.2,
            filter_attack=0.002,
            filter_decay=0.25,
            filter_sustain=0.3,
            filter_t_time=-0.3,
            filter_release=0.15,
            delay_send=0.15,
            delay_time=0.5,
            delay_feedback=0.3,
            reverb_send=0.35,
            reverb_room=0.7,
        ),
    ]
    return {p.name: p for p in presets}


def get_factory_preset(name: str) -> Preset:
    presets = factory_presets()
    if name not in presets:
        raise PresetError(
            f"unknown factory preset {name!r}; available: {', '.join(presets)}"
        )
    return presets[name]
