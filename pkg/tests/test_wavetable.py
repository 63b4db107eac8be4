"""Alias-free tables, morph oscillator, supersaw stack."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wintersynth.blocks import CONTROL_BLOCK
from wintersynth import wavetable as wt

SR = 48000


# ---------------------------------------------------------------------------
# harmonic counts and table construction
# ---------------------------------------------------------------------------


def test_max_harmonic_reference_values():
    # frozen from the closed form floor(sr / (2 * 440 * 2^((n-69)/12)))
    assert wt.max_harmonic(69, SR) == 54
    assert wt.max_harmonic(127, SR) == 1
    assert wt.max_harmonic(0, SR) == 2935


def test_max_harmonic_matches_formula_everywhere():
    for note in range(128):
        expected = int(SR / (2 * 440.0 * math.exp(math.log(2.0) * (note - 69) / 12)))
        assert wt.max_harmonic(note, SR) == max(1, expected)


def test_max_harmonic_validates():
    with pytest.raises(ValueError):
        wt.max_harmonic(128, SR)
    with pytest.raises(ValueError):
        wt.max_harmonic(60, 0)


def test_highest_note_is_pure_sine():
    table = wt.build_saw_table(127, SR)
    ref = np.sin(2 * np.pi * np.arange(wt.TABLE_SIZE) / wt.TABLE_SIZE)
    assert np.max(np.abs(table.samples)) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(table.samples, ref, atol=1e-9)


def test_table_partial_ratios():
    table = wt.build_saw_table(69, SR)
    spec = np.abs(np.fft.rfft(table.samples))
    for k in range(2, 55):
        assert spec[k] / spec[1] == pytest.approx(1.0 / k, rel=1e-6)


def test_table_has_no_partials_above_limit():
    for note in (0, 36, 69, 100):
        table = wt.build_saw_table(note, SR)
        imaxh = wt.max_harmonic(note, SR)
        spec = np.abs(np.fft.rfft(table.samples))
        floor_db = 20 * np.log10(np.max(spec[imaxh + 1 :]) / spec.max() + 1e-30)
        assert floor_db < -100.0


def test_bank_complete_deterministic_immutable(bank48):
    assert len(bank48) == 128
    rebuilt = wt.WavetableBank(SR)
    assert np.array_equal(bank48.tables, rebuilt.tables)
    assert not bank48.tables.flags.writeable
    with pytest.raises(ValueError):
        bank48.tables[0, 0] = 1.0


# ---------------------------------------------------------------------------
# table reads
# ---------------------------------------------------------------------------


def test_table_read_endpoints(bank48):
    table = bank48[60]
    assert wt.table_read(table, 0.0) == table.samples[0]
    mid = wt.table_read(table, 0.5 + 0.25 / wt.TABLE_SIZE)
    lo, hi = table.samples[4096], table.samples[4097]
    assert mid == pytest.approx(lo + 0.25 * (hi - lo), abs=1e-12)


def test_table_read_slot_centers_identity(bank48):
    table = bank48[40]
    phases = np.arange(wt.TABLE_SIZE) / wt.TABLE_SIZE
    assert np.array_equal(wt.table_read(table, phases), table.samples)


# ---------------------------------------------------------------------------
# pulse-width wobble
# ---------------------------------------------------------------------------


def test_pwm_wobble_values():
    assert wt.pwm_wobble(0.0) == 0.5
    assert wt.pwm_wobble(0.5) == pytest.approx(0.51, abs=1e-12)
    t = np.linspace(0, 2, 20001)
    w = wt.pwm_wobble(t)
    assert w.min() == pytest.approx(0.49, abs=1e-6)
    assert w.max() == pytest.approx(0.51, abs=1e-6)


# ---------------------------------------------------------------------------
# morph oscillator
# ---------------------------------------------------------------------------


def test_morph_shape_zero_is_saw(bank48):
    osc = wt.MorphOsc(bank48, 60, SR)
    n = 256
    out = osc.render(n, freq=SR / 512.0, shape=0.0, pw=0.5)
    phases = (np.arange(n) * (1.0 / 512.0)) % 1.0
    assert np.allclose(out, wt.table_read(bank48[60], phases), atol=1e-12)


def test_morph_square_zero_mean(bank48):
    osc = wt.MorphOsc(bank48, 60, SR)
    period = 512
    out = osc.render(period * 10, freq=SR / period, shape=1.0, pw=0.5)
    assert abs(out.mean()) < 1e-3


def test_morph_fundamental_peak(bank48):
    osc = wt.MorphOsc(bank48, 60, SR)
    freq = 261.63
    out = osc.render(SR * 2, freq=freq, shape=0.0, pw=0.5)
    spec = np.abs(np.fft.rfft(out * np.hanning(len(out))))
    peak = np.argmax(spec)
    bin_hz = SR / len(out)
    assert abs(peak * bin_hz - freq) <= bin_hz


def test_morph_clamps_pulse_width(bank48):
    osc = wt.MorphOsc(bank48, 60, SR)
    a = wt.MorphOsc(bank48, 60, SR).render(64, 440.0, 1.0, 0.01)
    b = osc.render(64, 440.0, 1.0, wt.PW_MIN)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# supersaw stack
# ---------------------------------------------------------------------------


def test_detune_constants():
    mult = wt.voice_frequency_multipliers(1.0)
    assert mult[0] == pytest.approx(1.0024, abs=1e-12)
    assert mult[1] == pytest.approx(1.019, abs=1e-12)
    assert np.allclose(
        mult, [1.0024, 1.019, 0.981, 0.9977, 1.0046, 0.9954, 1.0093, 0.9907], atol=1e-12
    )


def test_stereo_weights_full_width():
    wl, wr = wt.stereo_weights(1.0)
    assert np.array_equal(wl, [1, 0, 0, 1, 1, 0, 0, 1])
    assert np.array_equal(wr, 1.0 - wl)


def test_stereo_weight_sign_symmetry():
    # flipping the width sign swaps the channels
    for width in (0.2, 0.7, 1.0):
        wl_pos, wr_pos = wt.stereo_weights(width)
        wl_neg, wr_neg = wt.stereo_weights(-width)
        assert np.allclose(wl_neg, wr_pos) and np.allclose(wr_neg, wl_pos)


def test_superosc_unison_collapse(bank48):
    # detune=0, width=0: 8 aligned voices with 0.5 weights on both sides
    osc = wt.SuperOsc(bank48, SR)
    l, r = osc.render(256, freq=220.0, shape=0.0, detune=0.0, width=0.0, vol=0.8, note=57)
    single = wt.MorphOsc(bank48, 57, SR).render(256, 220.0, 0.0, 0.5)
    assert np.allclose(l, r, atol=1e-15)
    assert np.allclose(l, 0.8 * 0.5 * single, atol=1e-9)


def test_superosc_voice_isolation_matches_morph(bank48):
    detune = 0.7
    osc = wt.SuperOsc(bank48, SR)
    voices = osc.render_voices(CONTROL_BLOCK * 8, freq=440.0, shape=0.3, detune=detune, note=69)
    for i in (0, 3, 7):
        ref_osc = wt.MorphOsc(bank48, 69, SR)
        mult = wt.voice_frequency_multipliers(detune)[i]
        out = np.empty(CONTROL_BLOCK * 8)
        for blk in range(8):
            pw = float(wt.pwm_wobble(blk * CONTROL_BLOCK / SR))
            for s in range(CONTROL_BLOCK):
                out[blk * CONTROL_BLOCK + s] = ref_osc.tick(440.0 * mult, 0.3, pw)
        assert np.allclose(voices[i], out, atol=1e-12)


def test_superosc_vol_clamped(bank48):
    osc = wt.SuperOsc(bank48, SR)
    l1, _ = osc.render(64, 220.0, 0.0, 0.0, 0.0, vol=2.0, note=57)
    osc2 = wt.SuperOsc(bank48, SR)
    l2, _ = osc2.render(64, 220.0, 0.0, 0.0, 0.0, vol=1.0, note=57)
    assert np.array_equal(l1, l2)


@given(
    shape=st.floats(0.0, 1.0),
    detune=st.floats(0.0, 1.0),
    width=st.floats(0.0, 1.0),
    vol=st.floats(0.0, 1.0),
    note=st.integers(20, 110),
)
@settings(max_examples=40, deadline=None)
def test_superosc_output_bounded(bank48, shape, detune, width, vol, note):
    osc = wt.SuperOsc(bank48, SR)
    l, r = osc.render(
        CONTROL_BLOCK * 4, wt.midi_to_hz(note), shape, detune, width, vol, note
    )
    limit = vol * 1.5 + 1e-9
    assert np.max(np.abs(l)) <= limit
    assert np.max(np.abs(r)) <= limit


def test_alias_free_rendering_sampled_notes(bank48):
    # rendering each note at its own pitch leaves nothing above the
    # band limit stronger than -60 dB relative to the fundamental
    for note in (30, 60, 90, 110):
        osc = wt.MorphOsc(bank48, note, SR)
        f0 = wt.midi_to_hz(note)
        out = osc.render(SR, f0, 0.0, 0.5)
        spec = np.abs(np.fft.rfft(out * np.hanning(len(out))))
        bin_hz = SR / len(out)
        fund = spec[int(round(f0 / bin_hz))]
        limit_bin = int(wt.max_harmonic(note, SR) * f0 / bin_hz) + 4
        above = spec[limit_bin:]
        if len(above):
            assert 20 * np.log10(above.max() / fund + 1e-30) < -60.0
