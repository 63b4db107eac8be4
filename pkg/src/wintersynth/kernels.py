"""Jitted inner loops for the render hot path.

Everything here operates on preallocated float64 arrays so render threads
never allocate. Control values are scalars frozen for one control block;
the loops below advance the audio-rate state sample by sample.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# decaying feedback paths are snapped to zero below this to keep states out
# of subnormal range, where x86 float math runs orders of magnitude slower
FLUSH = 1e-30


@njit(cache=True)
def reson_stages(x, c1, c2, c3, state, out):
    # cascaded two-pole bandpass: y[n] = c1*x[n] + c2*y[n-1] - c3*y[n-2]
    stages = state.shape[0]
    for s in range(x.shape[0]):
        y = x[s]
        for st in range(stages):
            yn = c1 * y + c2 * state[st, 0] - c3 * state[st, 1]
            state[st, 1] = state[st, 0]
            state[st, 0] = yn
            y = yn
        out[s] = y
    for st in range(stages):
        if -FLUSH < state[st, 0] < FLUSH:
            state[st, 0] = 0.0
        if -FLUSH < state[st, 1] < FLUSH:
            state[st, 1] = 0.0


@njit(cache=True)
def drone_block(
    noise,
    env_level,
    drift,
    lfo_phase,
    idx,
    n_voices,
    fundamental,
    spread,
    offset,
    pitch_mod,
    resonance,
    damp,
    sr,
    fstate,
    stab_flag,
    outl,
    outr,
):
    """One control block of every drone voice, accumulated into outl/outr.

    Each voice: envelope-squared noise -> two resonator stages at the
    modulated center frequency -> spectral tilt gain -> sqrt pan.
    """
    nb = noise.shape[0]
    half_n = 0.5 * n_voices
    cf_max = 0.497 * sr
    res = resonance if resonance > 1e-6 else 1e-6
    two_pi = 2.0 * math.pi
    for v in range(env_level.shape[0]):
        lvl = env_level[v]
        center = fundamental * (idx[v] * spread + offset)
        if center < 1.0:
            center = 1.0
        elif center > 0.45 * sr:
            center = 0.45 * sr
        cf = center * 2.0 ** ((lvl * pitch_mod + drift[v]) / 12.0)
        if cf < 1.0:
            cf = 1.0
        elif cf > cf_max:
            cf = cf_max
        bw = center / res
        c3 = math.exp(-two_pi * bw / sr)
        c2 = (4.0 * c3 / (1.0 + c3)) * math.cos(two_pi * cf / sr)
        c1 = (1.0 - c3) * math.sqrt(1.0 - c2 * c2 / (4.0 * c3))
        if not (c3 < 1.0 and c2 * c2 < 4.0 * c3):
            stab_flag[0] = 1
        amp = lvl * lvl
        pan = 0.5 * (1.0 + math.sin(two_pi * lfo_phase[v]))
        if pan < 0.0:
            pan = 0.0
        elif pan > 1.0:
            pan = 1.0
        tilt = 0.001 * (1.0 + damp * (idx[v] - half_n) / n_voices)
        gl = tilt * math.sqrt(pan)
        gr = tilt * math.sqrt(1.0 - pan)
        y1a = fstate[v, 0]
        y2a = fstate[v, 1]
        y1b = fstate[v, 2]
        y2b = fstate[v, 3]
        for s in range(nb):
            x = noise[s] * amp
            ya = c1 * x + c2 * y1a - c3 * y2a
            y2a = y1a
            y1a = ya
            yb = c1 * ya + c2 * y1b - c3 * y2b
            y2b = y1b
            y1b = yb
            outl[s] += yb * gl
            outr[s] += yb * gr
        if -FLUSH < y1a < FLUSH:
            y1a = 0.0
        if -FLUSH < y2a < FLUSH:
            y2a = 0.0
        if -FLUSH < y1b < FLUSH:
            y1b = 0.0
        if -FLUSH < y2b < FLUSH:
            y2b = 0.0
        fstate[v, 0] = y1a
        fstate[v, 1] = y2a
        fstate[v, 2] = y1b
        fstate[v, 3] = y2b


@njit(cache=True)
def supersaw_voices_block(tbl, phases, incs, shape, pw, out):
    """Per-voice morph oscillator streams for one control block.

    out is (8, n). Phases advance in place. The pulse branch is the
    dual-saw difference with the 2*pw-1 level correction.
    """
    n_slots = tbl.shape[0]
    nb = out.shape[1]
    dc = 2.0 * pw - 1.0
    for i in range(8):
        ph = phases[i]
        inc = incs[i]
        for s in range(nb):
            pos = ph * n_slots
            i0 = int(pos)
            fr = pos - i0
            i1 = i0 + 1
            if i1 == n_slots:
                i1 = 0
            saw = tbl[i0] + (tbl[i1] - tbl[i0]) * fr
            ph2 = ph + pw
            ph2 -= math.floor(ph2)
            pos2 = ph2 * n_slots
            j0 = int(pos2)
            fr2 = pos2 - j0
            j1 = j0 + 1
            if j1 == n_slots:
                j1 = 0
            shifted = tbl[j0] + (tbl[j1] - tbl[j0]) * fr2
            pulse = saw - shifted + dc
            out[i, s] = (1.0 - shape) * saw + shape * pulse
            ph += inc
            ph -= math.floor(ph)
        phases[i] = ph


@njit(cache=True)
def shadows_block(
    tables,
    active,
    notes,
    phases,
    incs,
    shape,
    pw,
    wl,
    wr,
    vol,
    cutoff,
    q1,
    q2,
    post,
    fstate,
    sr,
    outl,
    outr,
):
    """One control block of every active polysynth voice.

    Per voice: 8 morph oscillators mixed with the stereo weight table,
    then a 4-pole resonant lowpass (two biquad stages per channel), then
    the post gain (amp envelope times velocity), accumulated into outl/outr.
    fstate is (voices, 2 channels, 2 stages, 2 states).
    """
    n_slots = tables.shape[1]
    nb = outl.shape[0]
    dc = 2.0 * pw - 1.0
    two_pi = 2.0 * math.pi
    for v in range(active.shape[0]):
        if active[v] == 0:
            continue
        tbl = tables[notes[v]]
        w0 = two_pi * cutoff[v] / sr
        cw = math.cos(w0)
        sw = math.sin(w0)
        # stage A
        al = sw / (2.0 * q1)
        a0i = 1.0 / (1.0 + al)
        b0a = 0.5 * (1.0 - cw) * a0i
        b1a = (1.0 - cw) * a0i
        a1a = -2.0 * cw * a0i
        a2a = (1.0 - al) * a0i
        # stage B carries the resonance
        al = sw / (2.0 * q2)
        a0i = 1.0 / (1.0 + al)
        b0b = 0.5 * (1.0 - cw) * a0i
        b1b = (1.0 - cw) * a0i
        a1b = -2.0 * cw * a0i
        a2b = (1.0 - al) * a0i

        sl1a = fstate[v, 0, 0, 0]
        sl2a = fstate[v, 0, 0, 1]
        sl1b = fstate[v, 0, 1, 0]
        sl2b = fstate[v, 0, 1, 1]
        sr1a = fstate[v, 1, 0, 0]
        sr2a = fstate[v, 1, 0, 1]
        sr1b = fstate[v, 1, 1, 0]
        sr2b = fstate[v, 1, 1, 1]
        g = post[v]
        for s in range(nb):
            accl = 0.0
            accr = 0.0
            for i in range(8):
                ph = phases[v, i]
                pos = ph * n_slots
                i0 = int(pos)
                fr = pos - i0
                i1 = i0 + 1
                if i1 == n_slots:
                    i1 = 0
                saw = tbl[i0] + (tbl[i1] - tbl[i0]) * fr
                ph2 = ph + pw
                ph2 -= math.floor(ph2)
                pos2 = ph2 * n_slots
                j0 = int(pos2)
                fr2 = pos2 - j0
                j1 = j0 + 1
                if j1 == n_slots:
                    j1 = 0
                shifted = tbl[j0] + (tbl[j1] - tbl[j0]) * fr2
                pulse = saw - shifted + dc
                a = (1.0 - shape) * saw + shape * pulse
                accl += a * wl[i]
                accr += a * wr[i]
                ph += incs[v, i]
                ph -= math.floor(ph)
                phases[v, i] = ph
            xl = accl * 0.125 * vol
            xr = accr * 0.125 * vol
            # left channel, biquads in transposed direct form II
            y = b0a * xl + sl1a
            sl1a = b1a * xl - a1a * y + sl2a
            sl2a = b0a * xl - a2a * y
            y2 = b0b * y + sl1b
            sl1b = b1b * y - a1b * y2 + sl2b
            sl2b = b0b * y - a2b * y2
            outl[s] += y2 * g
            # right channel
            y = b0a * xr + sr1a
            sr1a = b1a * xr - a1a * y + sr2a
            sr2a = b0a * xr - a2a * y
            y2 = b0b * y + sr1b
            sr1b = b1b * y - a1b * y2 + sr2b
            sr2b = b0b * y - a2b * y2
            outr[s] += y2 * g
        fstate[v, 0, 0, 0] = sl1a
        fstate[v, 0, 0, 1] = sl2a
        fstate[v, 0, 1, 0] = sl1b
        fstate[v, 0, 1, 1] = sl2b
        fstate[v, 1, 0, 0] = sr1a
        fstate[v, 1, 0, 1] = sr2a
        fstate[v, 1, 1, 0] = sr1b
        fstate[v, 1, 1, 1] = sr2b


@njit(cache=True)
def drone_control_block(
    t,
    dt,
    u_level,
    g_trig,
    u_drift,
    u_jit,
    stage,
    seg_t,
    start,
    target,
    att_arr,
    dec_arr,
    level,
    next_trig,
    drift_y,
    jit_val,
    jit_boundary,
    lfo_phase,
    att,
    dec,
    amp_rand,
    rate_per_voice,
    dev,
    drift_amt,
    drift_c1,
    drift_c2,
    pan_rate,
    jit_rate,
    trig_count,
):
    """Control-rate state step for all drone voices.

    Retrigger scheduling, envelope segments, smoothed pitch drift and the
    jittered pan LFO phase all advance by one control period dt. The four
    random vectors are consumed positionally (one of each per voice per
    block) so the draw sequence is independent of what fires.
    """
    for v in range(level.shape[0]):
        if t >= next_trig[v]:
            start[v] = level[v]  # retrigger from the current level, no click
            target[v] = 1.0 - u_level[v] * amp_rand
            att_arr[v] = att
            dec_arr[v] = dec
            seg_t[v] = 0.0
            stage[v] = 1
            iv = (1.0 + dev * g_trig[v]) / rate_per_voice
            if iv < 1e-3:
                iv = 1e-3
            # schedule from the previous scheduled time so intervals stay
            # exact; never fall behind the clock by more than one block
            next_trig[v] += iv
            if next_trig[v] < t:
                next_trig[v] = t
            trig_count[0] += 1
        rem = dt
        while rem > 0.0 and stage[v] != 0:
            if stage[v] == 1:  # attack toward target
                seg = att_arr[v]
                if seg_t[v] + rem < seg:
                    seg_t[v] += rem
                    rem = 0.0
                    level[v] = start[v] + (target[v] - start[v]) * (seg_t[v] / seg)
                else:
                    rem -= seg - seg_t[v]
                    level[v] = target[v]
                    start[v] = target[v]
                    seg_t[v] = 0.0
                    stage[v] = 2
                    if dec_arr[v] == 0.0:
                        level[v] = 0.0
                        stage[v] = 0
            else:  # decay toward zero
                seg = dec_arr[v]
                if seg_t[v] + rem < seg:
                    seg_t[v] += rem
                    rem = 0.0
                    level[v] = start[v] * (1.0 - seg_t[v] / seg)
                else:
                    if seg > seg_t[v]:
                        rem -= seg - seg_t[v]
                    level[v] = 0.0
                    seg_t[v] = 0.0
                    stage[v] = 0
        x = (2.0 * u_drift[v] - 1.0) * drift_amt
        yd = drift_c1 * x + drift_c2 * drift_y[v]
        drift_y[v] = 0.0 if -FLUSH < yd < FLUSH else yd
        if jit_rate > 0.0:
            while t >= jit_boundary[v] / jit_rate:
                jit_val[v] = 0.9 + 0.2 * u_jit[v]
                jit_boundary[v] += 1.0
        lfo_phase[v] += pan_rate * jit_val[v] * dt
        lfo_phase[v] -= math.floor(lfo_phase[v])


@njit(cache=True)
def delay_block(inl, inr, outl, outr, ring, widx, dsamp, fb, mix):
    # ring stores u[n] = x[n] + fb*wet[n] so that wet[n] = u[n-T]
    length = ring.shape[1]
    w = widx[0]
    dry = 1.0 - mix
    for s in range(inl.shape[0]):
        r = w - dsamp
        if r < 0:
            r += length
        wetl = ring[0, r]
        wetr = ring[1, r]
        ul = inl[s] + fb * wetl
        ur = inr[s] + fb * wetr
        ring[0, w] = 0.0 if -FLUSH < ul < FLUSH else ul
        ring[1, w] = 0.0 if -FLUSH < ur < FLUSH else ur
        outl[s] = dry * inl[s] + mix * wetl
        outr[s] = dry * inr[s] + mix * wetr
        w += 1
        if w == length:
            w = 0
    widx[0] = w


@njit(cache=True)
def reverb_block(
    inl, inr, outl, outr, combs, comb_idx, comb_len, comb_g, aps, ap_idx, ap_len, ap_g, mix
):
    # four parallel feedback combs into two series allpasses, per channel
    dry = 1.0 - mix
    for s in range(inl.shape[0]):
        for ch in range(2):
            x = inl[s] if ch == 0 else inr[s]
            csum = 0.0
            for c in range(combs.shape[1]):
                i = comb_idx[ch, c]
                y = combs[ch, c, i]
                u = x + comb_g[c] * y
                combs[ch, c, i] = 0.0 if -FLUSH < u < FLUSH else u
                i += 1
                if i == comb_len[c]:
                    i = 0
                comb_idx[ch, c] = i
                csum += y
            a = csum * 0.25
            for p in range(aps.shape[1]):
                i = ap_idx[ch, p]
                buf = aps[ch, p, i]
                out = -ap_g * a + buf
                u = a + ap_g * out
                aps[ch, p, i] = 0.0 if -FLUSH < u < FLUSH else u
                i += 1
                if i == ap_len[p]:
                    i = 0
                ap_idx[ch, p] = i
                a = out
            if ch == 0:
                outl[s] = dry * x + mix * a
            else:
                outr[s] = dry * x + mix * a


def warmup():
    """Compile every kernel on tiny inputs (predictable first-render cost)."""
    z16 = np.zeros(16)
    reson_stages(z16, 0.1, 0.0, 0.0, np.zeros((2, 2)), np.empty(16))
    drone_block(
        z16,
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.ones(1),
        1.0,
        55.0,
        1.0,
        0.0,
        0.0,
        40.0,
        0.0,
        48000.0,
        np.zeros((1, 4)),
        np.zeros(1, dtype=np.int64),
        np.zeros(16),
        np.zeros(16),
    )
    z1 = np.zeros(1)
    drone_control_block(
        0.0,
        16.0 / 48000.0,
        z1,
        z1,
        z1,
        z1,
        np.zeros(1, dtype=np.int8),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.zeros(1),
        np.ones(1),
        np.ones(1),
        np.zeros(1),
        0.5,
        1.0,
        0.0,
        1.0,
        0.5,
        0.1,
        0.5,
        0.5,
        0.2,
        0.06,
        np.zeros(1, dtype=np.int64),
    )
    tbl = np.zeros((2, 64))
    tbl.flags.writeable = False  # engines pass read-only banks
    supersaw_voices_block(tbl[0], np.zeros(8), np.zeros(8), 0.0, 0.5, np.zeros((8, 16)))
    shadows_block(
        tbl,
        np.ones(1, dtype=np.uint8),
        np.zeros(1, dtype=np.int64),
        np.zeros((1, 8)),
        np.zeros((1, 8)),
        0.0,
        0.5,
        np.full(8, 0.5),
        np.full(8, 0.5),
        1.0,
        np.full(1, 1000.0),
        0.5412,
        1.3066,
        np.ones(1),
        np.zeros((1, 2, 2, 2)),
        48000.0,
        np.zeros(16),
        np.zeros(16),
    )
    delay_block(
        z16, z16, np.empty(16), np.empty(16), np.zeros((2, 64)), np.zeros(1, dtype=np.int64),
        32, 0.5, 1.0,
    )
    reverb_block(
        z16,
        z16,
        np.empty(16),
        np.empty(16),
        np.zeros((2, 4, 64)),
        np.zeros((2, 4), dtype=np.int64),
        np.full(4, 64, dtype=np.int64),
        np.full(4, 0.5),
        np.zeros((2, 2, 16)),
        np.zeros((2, 2), dtype=np.int64),
        np.full(2, 16, dtype=np.int64),
        0.7,
        1.0,
    )
