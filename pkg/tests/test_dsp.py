"""Unit generators: noise, triggers, smoothers, LFO, resonator, envelope, pan."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wintersynth.blocks import RngStream
from wintersynth import dsp


# ---------------------------------------------------------------------------
# white noise
# ---------------------------------------------------------------------------


def test_noise_deterministic_per_seed():
    a = dsp.white_noise(RngStream(7), 4)
    b = dsp.white_noise(RngStream(7), 4)
    assert np.array_equal(a, b)


def test_noise_statistics():
    x = dsp.white_noise(RngStream(1), 1_000_000)
    assert abs(x.mean()) < 0.01  # Monte-Carlo: uniform on [-1,1] has mean 0
    assert x.min() >= -1.0 and x.max() <= 1.0


def test_noise_rejects_empty():
    with pytest.raises(ValueError):
        dsp.white_noise(RngStream(0), 0)


# ---------------------------------------------------------------------------
# gaussian trigger intervals
# ---------------------------------------------------------------------------


def test_trigger_zero_deviation_is_periodic():
    rng = RngStream(3)
    intervals = [dsp.gauss_trigger_next(rng, 2.0, 0.0) for _ in range(10)]
    assert intervals == [0.5] * 10


def test_trigger_mean_interval():
    rng = RngStream(5)
    draws = np.array([dsp.gauss_trigger_next(rng, 1.0, 0.5) for _ in range(10_000)])
    assert abs(draws.mean() - 1.0) < 0.02  # Monte-Carlo oracle
    assert draws.min() >= 1e-3


def test_trigger_rejects_bad_rate():
    with pytest.raises(ValueError):
        dsp.gauss_trigger_next(RngStream(0), 0.0, 0.5)


# ---------------------------------------------------------------------------
# one-pole smoother
# ---------------------------------------------------------------------------


def test_one_pole_dc_gain():
    sm = dsp.OnePoleSmoother(cutoff=10.0, update_rate=1000.0)
    y = 0.0
    for _ in range(5000):
        y = sm.tick(0.7)
    assert abs(y - 0.7) < 1e-6


def test_one_pole_zero_cutoff_freezes():
    sm = dsp.OnePoleSmoother(cutoff=0.0, update_rate=1000.0, initial=0.25)
    for _ in range(100):
        assert sm.tick(5.0) == 0.25


def test_one_pole_clamps_cutoff_at_nyquist():
    sm = dsp.OnePoleSmoother(cutoff=10_000.0, update_rate=1000.0)
    y = 0.0
    for _ in range(50):
        y = sm.tick(1.0)
    assert math.isfinite(y) and abs(y - 1.0) < 1e-6


def test_one_pole_time_constant():
    # step response should hit 1-1/e after ~RC = 1/(2*pi*fc) seconds
    rate = 1000.0
    sm = dsp.OnePoleSmoother(cutoff=1.0, update_rate=rate)
    n = 0
    y = 0.0
    while y < 1.0 - math.exp(-1.0):
        y = sm.tick(1.0)
        n += 1
    measured = n / rate
    expected = 1.0 / (2.0 * math.pi)
    assert abs(measured - expected) / expected < 0.10


# ---------------------------------------------------------------------------
# sample & hold
# ---------------------------------------------------------------------------


def test_sample_hold_degenerate_range():
    sh = dsp.SampleHoldRandom(RngStream(0), 1.0, 1.0, 100.0)
    assert all(sh.value_at(t) == 1.0 for t in np.linspace(0, 1, 50))


def test_sample_hold_redraw_boundaries():
    sh = dsp.SampleHoldRandom(RngStream(2), 0.9, 1.1, 4.0)
    ts = np.arange(0, 1.0, 0.001)
    values = np.array([sh.value_at(t) for t in ts])
    changes = ts[1:][np.diff(values) != 0]
    assert len(changes) > 0
    for t in changes:
        # holds between redraws; changes land on the 0.25 s grid
        assert abs(t / 0.25 - round(t / 0.25)) < 0.002 / 0.25


def test_sample_hold_mean():
    rng = RngStream(9)
    draws = [dsp.SampleHoldRandom(rng, 0.9, 1.1, 0.0).value for _ in range(10_000)]
    assert abs(np.mean(draws) - 1.0) < 0.01 * 1.0  # within 1% of (lo+hi)/2


def test_sample_hold_zero_rate_holds_forever():
    sh = dsp.SampleHoldRandom(RngStream(4), 0.0, 1.0, 0.0)
    first = sh.value_at(0.0)
    assert sh.value_at(1e6) == first


def test_sample_hold_rejects_inverted_range():
    with pytest.raises(ValueError):
        dsp.SampleHoldRandom(RngStream(0), 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        dsp.SampleHoldRandom(RngStream(0), 0.0, 1.0, -1.0)


# ---------------------------------------------------------------------------
# pan LFO
# ---------------------------------------------------------------------------


def test_lfo_constant_at_zero_rate():
    assert dsp.unipolar_sine_lfo(0.0, 0.0, 123.0) == 0.5


def test_lfo_phase_offset():
    assert dsp.unipolar_sine_lfo(1.0, 0.25, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_lfo_range_over_one_period():
    t = np.arange(4096) / 4096.0
    u = dsp.unipolar_sine_lfo(1.0, 0.0, t)
    assert u.min() == pytest.approx(0.0, abs=1e-9)
    assert u.max() == pytest.approx(1.0, abs=1e-9)
    assert np.all((u >= -1e-12) & (u <= 1 + 1e-12))


# ---------------------------------------------------------------------------
# resonant bandpass
# ---------------------------------------------------------------------------


def _steady_gain(sr, cf, bw, stages, freq, seconds=1.0):
    flt = dsp.ResonantBandpass(sr, stages=stages)
    t = np.arange(int(sr * seconds)) / sr
    x = np.sin(2 * np.pi * freq * t)
    y = flt.process(x, cf, bw)
    tail = slice(int(sr * 0.6), None)
    return np.sqrt(np.mean(y[tail] ** 2)) / np.sqrt(np.mean(x[tail] ** 2))


def test_reson_unit_gain_at_center():
    g = _steady_gain(48000, 1000.0, 50.0, 1, 1000.0)
    assert abs(20 * np.log10(g)) < 0.5


def test_reson_attenuates_off_center():
    for freq in (750.0, 1250.0):  # cf +- 5*bw
        g = _steady_gain(48000, 1000.0, 50.0, 2, freq)
        assert 20 * np.log10(g) <= -12.0


def test_reson_zero_in_zero_out():
    flt = dsp.ResonantBandpass(48000, stages=2)
    out = flt.process(np.zeros(512), 500.0, 20.0)
    assert np.all(out == 0.0)


def test_reson_requires_a_stage():
    with pytest.raises(ValueError):
        dsp.ResonantBandpass(48000, stages=0)


def test_reson_rejects_nan():
    flt = dsp.ResonantBandpass(48000)
    x = np.zeros(64)
    x[10] = np.nan
    with pytest.raises(ValueError):
        flt.process(x, 500.0, 20.0)


def test_reson_clamps_out_of_range_center():
    flt = dsp.ResonantBandpass(48000)
    flt.process(np.zeros(64), 60000.0, 20.0)
    assert flt.clamped


def test_reson_matches_scalar_recursion():
    # independent scalar reference for the cascade
    rng = np.random.default_rng(0)
    x = rng.standard_normal(128)
    flt = dsp.ResonantBandpass(48000, stages=2)
    out = flt.process(x, 800.0, 40.0)
    c1, c2, c3 = dsp.reson_coeffs(800.0, 40.0, 48000)
    state = [[0.0, 0.0], [0.0, 0.0]]
    ref = np.empty_like(x)
    for n in range(len(x)):
        y = x[n]
        for st_ in state:
            yn = c1 * y + c2 * st_[0] - c3 * st_[1]
            st_[1] = st_[0]
            st_[0] = yn
            y = yn
        ref[n] = y
    assert np.allclose(out, ref, atol=1e-15)


@given(
    cf=st.floats(min_value=1.0, max_value=23000.0),
    bw=st.floats(min_value=0.01, max_value=10000.0),
)
@settings(max_examples=200, deadline=None)
def test_reson_pole_stability(cf, bw):
    c1, c2, c3 = dsp.reson_coeffs(cf, bw, 48000.0)
    assert 0.0 < c3 < 1.0
    assert c2 * c2 < 4.0 * c3


# ---------------------------------------------------------------------------
# retriggerable envelope
# ---------------------------------------------------------------------------


def test_envelope_linear_ramp():
    env = dsp.RetrigEnvelope()
    env.trigger(1.0, att=1.0, dec=1.0)
    assert env.tick(0.5) == pytest.approx(0.5)
    assert env.tick(0.5) == pytest.approx(1.0)
    assert env.tick(1.0) == pytest.approx(0.0)
    assert env.stage == dsp.ENV_IDLE


def test_envelope_retrigger_captures_level():
    env = dsp.RetrigEnvelope()
    env.trigger(1.0, att=1.0, dec=1.0)
    env.tick(0.4)
    assert env.level == pytest.approx(0.4)
    env.trigger(0.9, att=1.0, dec=1.0)
    assert env.level == pytest.approx(0.4)  # no click on retrigger
    assert env.tick(0.5) == pytest.approx(0.4 + (0.9 - 0.4) * 0.5)


def test_envelope_zero_attack_jumps():
    env = dsp.RetrigEnvelope()
    env.trigger(0.8, att=0.0, dec=1.0)
    assert env.level == pytest.approx(0.8)


def test_envelope_note_off_releases_from_current_level():
    env = dsp.RetrigEnvelope()
    env.trigger(1.0, att=1.0, dec=1.0)
    env.tick(0.6)
    env.note_off(release=0.5)
    assert env.tick(0.25) == pytest.approx(0.3)
    assert env.tick(0.25) == pytest.approx(0.0)


@given(
    events=st.lists(
        st.tuples(st.floats(0.0, 1.0), st.floats(0.001, 0.1)), min_size=1, max_size=30
    )
)
@settings(max_examples=100, deadline=None)
def test_envelope_bounded_and_continuous(events):
    att, dec = 0.05, 0.08
    env = dsp.RetrigEnvelope()
    prev = env.level
    max_slope = max(1.0 / att, 1.0 / dec)
    for level_max, dt in events:
        env.trigger(level_max, att, dec)
        for _ in range(5):
            y = env.tick(dt)
            assert 0.0 <= y <= 1.0
            assert abs(y - prev) <= max_slope * dt + 1e-9
            prev = y


# ---------------------------------------------------------------------------
# equal-power pan
# ---------------------------------------------------------------------------


def test_pan_center():
    l, r = dsp.equal_power_pan(1.0, 0.5)
    assert l == pytest.approx(0.70711, abs=1e-5)
    assert r == pytest.approx(0.70711, abs=1e-5)


def test_pan_extreme():
    assert dsp.equal_power_pan(0.8, 1.0) == (0.8, 0.0)


def test_pan_clamps_position():
    l, r = dsp.equal_power_pan(1.0, 1.5)
    assert (l, r) == (1.0, 0.0)


@given(s=st.floats(-2.0, 2.0), pos=st.floats(0.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_pan_power_identity(s, pos):
    l, r = dsp.equal_power_pan(s, pos)
    assert l * l + r * r == pytest.approx(s * s, rel=1e-6, abs=1e-12)
