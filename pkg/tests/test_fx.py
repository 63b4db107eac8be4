"""Feedback delay and Schroeder reverb."""

import numpy as np
import pytest

from wintersynth.fx import FeedbackDelay, SchroederReverb

SR = 48000


def test_delay_dry_path_bit_exact():
    d = FeedbackDelay(SR)
    x = np.random.default_rng(0).standard_normal(4096)
    outl, outr = d.process(x, x, time=0.25, feedback=0.5, mix=0.0)
    assert np.array_equal(outl, x)
    assert np.array_equal(outr, x)


def test_delay_impulse_response_taps():
    d = FeedbackDelay(SR)
    n = int(SR * 1.3)
    x = np.zeros(n)
    x[0] = 1.0
    outl, _ = d.process(x, x, time=0.25, feedback=0.5, mix=1.0)
    period = round(0.25 * SR)
    for k in range(1, 6):
        assert outl[k * period] == pytest.approx(0.5 ** (k - 1), abs=1e-12)
    # nothing but the taps
    mask = np.ones(n, dtype=bool)
    mask[::period] = False
    assert np.max(np.abs(outl[mask])) == 0.0


def test_delay_silence_in_silence_out():
    d = FeedbackDelay(SR)
    outl, outr = d.process(np.zeros(1024), np.zeros(1024), 0.1, 0.9, 0.7)
    assert not outl.any() and not outr.any()


def test_delay_clamps_unstable_feedback():
    d = FeedbackDelay(SR)
    x = np.zeros(SR * 2)
    x[0] = 1.0
    outl, _ = d.process(x, x, time=0.05, feedback=1.5, mix=1.0)
    assert np.isfinite(outl).all()
    assert np.max(np.abs(outl)) <= 1.0


def test_delay_rejects_bad_time():
    d = FeedbackDelay(SR)
    for bad in (0.0, -1.0, 6.0):
        with pytest.raises(ValueError):
            d.process(np.zeros(16), np.zeros(16), bad, 0.5, 0.5)


def test_reverb_dry_path():
    r = SchroederReverb(SR)
    x = np.random.default_rng(1).standard_normal(2048)
    outl, outr = r.process(x, x, room=0.5, mix=0.0)
    assert np.array_equal(outl, x)
    assert np.array_equal(outr, x)


def _energy_decay_curve(ir):
    e = np.cumsum(ir[::-1] ** 2)[::-1]
    e = np.maximum(e, 1e-30)
    return 10.0 * np.log10(e / e[0])


def test_reverb_decay_time():
    room = 0.5
    rt60 = SchroederReverb.rt60(room)
    assert rt60 == pytest.approx(2.75)
    r = SchroederReverb(SR)
    n = int(SR * (rt60 + 1.5))
    x = np.zeros(n)
    x[0] = 1.0
    outl, _ = r.process(x, x, room=room, mix=1.0)
    edc = _energy_decay_curve(outl)
    drop = -edc[int(rt60 * SR)]
    assert 55.0 <= drop <= 65.0


def test_reverb_bounded_for_bounded_input():
    r = SchroederReverb(SR)
    x = np.random.default_rng(2).uniform(-1, 1, SR)
    outl, outr = r.process(x, x, room=1.0, mix=1.0)
    assert np.isfinite(outl).all() and np.isfinite(outr).all()
    assert np.max(np.abs(outl)) < 100.0


def test_reverb_comb_constants():
    r = SchroederReverb(SR)
    assert list(r._comb_len) == [round(ms * SR / 1000) for ms in (29.7, 37.1, 41.1, 43.7)]
    assert list(r._ap_len) == [round(ms * SR / 1000) for ms in (5.0, 1.7)]
