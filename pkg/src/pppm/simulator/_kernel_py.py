"""Vectorised numpy decoder, used when the compiled kernel is unavailable.

Mirrors ``_kernel.pyx`` draw for draw; see ``kernels`` for the slot layout.
"""
from __future__ import annotations

import numpy as np

_NONE = np.iinfo(np.int64).max


def _first_click(u: np.ndarray, energy, steps: int) -> np.ndarray:
    """Tap index (1..T) of the first click, or _NONE."""
    energy = np.broadcast_to(np.asarray(energy, dtype=float), u.shape)
    out = np.full(u.shape, _NONE, dtype=np.int64)
    live = energy > 0.0
    with np.errstate(divide="ignore"):
        x = -np.log1p(-u[live]) * steps / energy[live]
    hit = x < steps
    idx = np.flatnonzero(live)[hit]
    out.flat[idx] = np.floor(x[hit]).astype(np.int64) + 1
    return out


def _helstrom(energy):
    return 0.5 * (1.0 - np.sqrt(-np.expm1(-4.0 * energy)))


def decode_block(amps, two_pulse, paper_model, steps, uniforms, out):
    """Decode ``len(uniforms)`` trials of one message into outcome ids.

    amps: real pulse-basis amplitudes (N,); uniforms: (n, slots) in [0, 1).
    """
    amps = np.asarray(amps, dtype=float)
    n_modes = amps.size
    n_pairs = n_modes * (n_modes - 1) // 2
    u = np.asarray(uniforms, dtype=float)
    n = u.shape[0]
    T = int(steps)
    energy = amps**2

    # first stage: lockstep VP taps on every mode
    clicks = _first_click(u[:, :n_modes], energy[None, :], T)
    order = np.argsort(clicks, axis=1, kind="stable")
    i = order[:, 0]
    j = order[:, 1]
    rows = np.arange(n)
    t1 = clicks[rows, i]
    t2 = clicks[rows, j]

    result = np.full(n, 2 * n_modes + 5 * n_pairs, dtype=np.int64)  # error2
    solo = (t1 != _NONE) & (t2 == _NONE)
    both = t2 != _NONE

    # solo click: Dolinar on the frozen remainder of mode i
    si = i[solo]
    true_sign = np.sign(amps[si])
    if paper_model and two_pulse:
        plus = u[solo, n_modes] < 0.5
    else:
        rem = energy[si] * (T - t1[solo]) / T
        correct = u[solo, n_modes] < 1.0 - _helstrom(rem)
        plus = np.where(correct, true_sign > 0, true_sign < 0)
    result[solo] = 2 * si + (~plus)

    # two clicks: block mode i down to mode j's remaining fraction, then mix
    bi, bj = i[both], j[both]
    frac = (T - t2[both]) / T
    ai = amps[bi] * np.sqrt(frac)
    aj = amps[bj] * np.sqrt(frac)
    out_i = (ai + aj) / np.sqrt(2.0)
    out_j = (-ai + aj) / np.sqrt(2.0)
    ub = u[both]
    c_i = _first_click(ub[:, n_modes + 1], out_i**2, T)
    c_j = _first_click(ub[:, n_modes + 2], out_j**2, T)
    use_j = c_j < c_i
    tc = np.where(use_j, c_j, c_i)
    fired = tc != _NONE
    b = np.where(use_j, out_j, out_i)
    rem = b**2 * (T - tc) / T
    correct = ub[:, n_modes + 3] < 1.0 - _helstrom(np.where(fired, rem, 0.0))
    sigma = np.where(correct, np.sign(b), -np.sign(b))
    # output i carries (a_i + a_j): equal signs; output j carries (a_j - a_i): opposite
    s_i = np.where(use_j, -sigma, sigma)
    s_j = sigma
    lo = np.minimum(bi, bj)
    hi = np.maximum(bi, bj)
    s_lo = np.where(bi < bj, s_i, s_j)
    s_hi = np.where(bi < bj, s_j, s_i)
    pidx = lo * n_modes - lo * (lo + 1) // 2 + (hi - lo - 1)
    sign_pair = 2 * (s_lo < 0) + (s_hi < 0)
    two_out = np.where(
        fired,
        2 * n_modes + 4 * pidx + sign_pair,
        2 * n_modes + 4 * n_pairs + pidx,
    )
    result[both] = two_out
    out[:] = result
    return out
