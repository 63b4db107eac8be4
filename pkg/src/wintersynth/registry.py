"""Parameter registry: every knob both instruments expose, with ranges,
curves and defaults. Engines, presets, the CLI, the server and the web UI
all enumerate this one list."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

ENGINES = ("wintermute", "shadows")


@dataclass(frozen=True)
class ParamDescriptor:
    id: str
    name: str
    unit: str
    lo: float
    hi: float
    curve: str  # "linear" | "exponential"
    default: float
    integer: bool = False

    def clamp(self, value: float) -> float:
        value = min(max(float(value), self.lo), self.hi)
        return float(round(value)) if self.integer else value

    def to_natural(self, norm: float) -> float:
        """Map a normalized [0,1] knob position to the declared range."""
        norm = min(max(float(norm), 0.0), 1.0)
        if self.curve == "exponential":
            nat = self.lo * (self.hi / self.lo) ** norm
        else:
            nat = self.lo + norm * (self.hi - self.lo)
        return float(round(nat)) if self.integer else nat

    def to_normalized(self, natural: float) -> float:
        natural = min(max(float(natural), self.lo), self.hi)
        if self.curve == "exponential":
            return math.log(natural / self.lo) / math.log(self.hi / self.lo)
        return (natural - self.lo) / (self.hi - self.lo)

    def as_dict(self) -> dict:
        return asdict(self)


def _p(pid, name, unit, lo, hi, curve, default, integer=False):
    return ParamDescriptor(pid, name, unit, lo, hi, curve, default, integer)


_FX = [
    ("delay_send", "Delay Send", "", 0.0, 1.0, "linear", 0.0),
    ("delay_time", "Delay Time", "s", 0.01, 5.0, "exponential", 0.5),
    ("delay_feedback", "Delay Feedback", "", 0.0, 0.95, "linear", 0.4),
    ("reverb_send", "Reverb Send", "", 0.0, 1.0, "linear", 0.0),
    ("reverb_room", "Reverb Room", "", 0.0, 1.0, "linear", 0.5),
]

WINTERMUTE_PARAMS = [
    _p("wintermute.fundamental", "Fundamental", "Hz", 20.0, 2000.0, "exponential", 55.0),
    _p("wintermute.offset", "Harmonic Offset", "harm", 0.0, 32.0, "linear", 0.0),
    _p("wintermute.spread", "Spread", "x", 0.05, 4.0, "exponential", 1.0),
    _p("wintermute.n_voices", "Voices", "", 1, 96, "linear", 96, integer=True),
    _p("wintermute.avg_rate", "Trigger Rate", "Hz", 0.05, 50.0, "exponential", 2.0),
    _p("wintermute.dev", "Trigger Deviation", "", 0.0, 2.0, "linear", 0.5),
    _p("wintermute.att", "Attack", "s", 0.001, 10.0, "exponential", 0.5),
    _p("wintermute.dec", "Decay", "s", 0.001, 10.0, "exponential", 1.0),
    _p("wintermute.amp_rand", "Level Random", "", 0.0, 1.0, "linear", 0.3),
    _p("wintermute.env_pitch_mod", "Env Pitch Mod", "semi", -24.0, 24.0, "linear", 0.0),
    _p("wintermute.drift_amt", "Drift Amount", "semi", 0.0, 12.0, "linear", 0.1),
    _p("wintermute.drift_rate", "Drift Rate", "Hz", 0.01, 100.0, "exponential", 1.0),
    _p("wintermute.resonance", "Resonance", "", 1.0, 500.0, "exponential", 40.0),
    _p("wintermute.pan_rate", "Pan Rate", "Hz", 0.01, 20.0, "exponential", 0.2),
    _p("wintermute.damp", "Tilt", "", -1.0, 1.0, "linear", 0.0),
] + [_p(f"wintermute.{pid}", name, unit, lo, hi, curve, default) for pid, name, unit, lo, hi, curve, default in _FX]

_ADSTR_DEFAULTS = {
    "attack": 0.01,
    "decay": 0.2,
    "sustain": 0.7,
    "t_time": 0.0,
    "release": 0.1,
}


def _adstr(prefix, label):
    out = []
    for field, default in _ADSTR_DEFAULTS.items():
        lo, hi = (-1.0, 1.0) if field == "t_time" else (0.0, 1.0)
        name = f"{label} {field.replace('_', ' ').title()}"
        out.append(_p(f"shadows.{prefix}_{field}", name, "", lo, hi, "linear", default))
    return out


SHADOWS_PARAMS = (
    [
        _p("shadows.shape", "Shape", "", 0.0, 1.0, "linear", 0.0),
        _p("shadows.detune", "Detune", "", 0.0, 1.0, "linear", 0.4),
        _p("shadows.width", "Width", "", 0.0, 1.0, "linear", 0.7),
        _p("shadows.volume", "Volume", "", 0.0, 1.0, "linear", 0.8),
        _p("shadows.cutoff", "Cutoff", "", 0.0, 1.0, "linear", 0.8),
        _p("shadows.resonance", "Filter Resonance", "", 0.0, 1.0, "linear", 0.1),
        _p("shadows.filter_env", "Filter Env Amount", "", -1.0, 1.0, "linear", 0.3),
        _p("shadows.phase_spread", "Phase Spread", "", 0, 1, "linear", 0, integer=True),
    ]
    + _adstr("amp", "Amp")
    + _adstr("filter", "Filter")
    + [_p(f"shadows.{pid}", name, unit, lo, hi, curve, default) for pid, name, unit, lo, hi, curve, default in _FX]
)

REGISTRY: dict[str, list[ParamDescriptor]] = {
    "wintermute": WINTERMUTE_PARAMS,
    "shadows": SHADOWS_PARAMS,
}

_BY_ID: dict[str, ParamDescriptor] = {}
for _engine, _params in REGISTRY.items():
    for _d in _params:
        assert _d.id not in _BY_ID, f"duplicate parameter id {_d.id}"
        assert _d.id.startswith(_engine + "."), f"{_d.id} not under {_engine}"
        assert _d.lo <= _d.default <= _d.hi, f"default out of range for {_d.id}"
        _BY_ID[_d.id] = _d


def descriptors(engine: str) -> list[ParamDescriptor]:
    if engine not in REGISTRY:
        raise KeyError(f"unknown engine {engine!r}")
    return REGISTRY[engine]


def descriptor(pid: str) -> ParamDescriptor:
    try:
        return _BY_ID[pid]
    except KeyError:
        raise KeyError(f"unknown parameter id {pid!r}") from None


def param_ids(engine: str) -> list[str]:
    return [d.id for d in descriptors(engine)]
