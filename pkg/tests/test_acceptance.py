"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion."""
import math
import time

import numpy as np

from pppm.codebook import Message, hadamard_matrix, message_to_transmit_state, prior_vector
from pppm.linear_optics import ModeAmplitudes, hadamard_butterfly
from pppm.detectors import (
    two_click_probabilities,
    two_click_probabilities_finite_T,
    vp_probabilities,
)
from pppm.rates import (
    build_conditional_table,
    hadamard_table,
    mutual_information,
    r_dolinar,
    r_hadamard,
    r_holevo_bpsk,
    r_pppm_closed,
    r_pppm_opt,
)
from pppm.simulator import SimConfig, compare_with_table, run_trials


def _clear_caches():
    vp_probabilities.cache_clear()
    two_click_probabilities.cache_clear()


def test_c1_vp_normalisation(report):
    _clear_caches()
    t0 = time.perf_counter()
    worst = 0.0
    for e in np.logspace(-3, 1, 30):
        vp = vp_probabilities(float(e))
        worst = max(worst, abs(vp.p_same + vp.p_diff + math.expm1(-e)))
    dt = time.perf_counter() - t0
    ok = report(1, worst <= 1e-9 and dt < 1.0, f"VP normalisation max err {worst:.2e}, {dt:.2f} s")
    assert ok


def test_c2_two_click_normalisation(report):
    _clear_caches()
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 4, 8, 16):
        for e in np.logspace(-3, 1, 20):
            tc = two_click_probabilities(float(e), n)
            target = math.expm1(-n * e / 2) ** 2
            worst = max(worst, abs(tc.p_s + tc.p_e + tc.p_nc - target))
    dt = time.perf_counter() - t0
    ok = report(2, worst <= 1e-6 and dt < 30.0, f"two-click normalisation max err {worst:.2e}, {dt:.2f} s")
    assert ok


def test_c3_finite_T_convergence(report):
    e, n = 0.1, 8
    def vec(tc):
        return np.array([tc.p_s, tc.p_e, tc.p_nc])

    cont = vec(two_click_probabilities(e, n))

    def fin(T):
        return vec(two_click_probabilities_finite_T(e, n, T))

    gaps = [np.abs(fin(T) - cont) for T in (500, 2000, 8000)]
    decreasing = bool(np.all(gaps[0] > gaps[1]) and np.all(gaps[1] > gaps[2]))
    g4000 = float(np.max(np.abs(fin(4000) - cont)))
    richardson = float(np.max(np.abs(2 * fin(8000) - fin(4000) - cont)))
    ok = decreasing and g4000 <= 5e-3 and richardson <= 1e-5
    report(3, ok, f"gaps at T=500/2000/8000 {[f'{g.max():.1e}' for g in gaps]}, T=4000 {g4000:.1e}, "
               f"Richardson {richardson:.1e}")
    assert ok


def test_c4_closed_form_equals_mutual_information(report):
    t0 = time.perf_counter()
    worst = 0.0
    for e in (0.02, 0.1, 0.5):
        for n in (2, 4, 8):
            table = build_conditional_table(e, n)
            for p in (0.0, 0.5, 1.0):
                mi = mutual_information(prior_vector(p, n), table)
                worst = max(worst, abs(n * r_pppm_closed(e, n, p) - mi))
    dt = time.perf_counter() - t0
    ok = report(4, worst <= 1e-9 and dt < 60.0, f"|N R - I| max {worst:.2e}, {dt:.2f} s")
    assert ok


def test_c5_hadamard_reduction(report):
    worst_closed = worst_mi = 0.0
    for e in (1e-3, 0.02, 0.1, 0.5, 2.0):
        for n in (2, 4, 8, 16, 32):
            had = r_hadamard(e, n)
            worst_closed = max(worst_closed, abs(r_pppm_closed(e, n, 1.0) - had))
            mi = mutual_information(np.full(2 * n, 1 / (2 * n)), hadamard_table(e, n))
            worst_mi = max(worst_mi, abs(n * had - mi))
    ok = worst_closed <= 1e-12 and worst_mi <= 1e-9
    report(5, ok, f"|R(p=1) - R_Had| {worst_closed:.1e}, |N R_Had - I| {worst_mi:.1e}")
    assert ok


CODESPACE_N4 = [
    ((1, 1, 1, 1), 0),
    ((1, -1, 1, -1), 1),
    ((1, 1, -1, -1), 2),
    ((1, -1, -1, 1), 3),
]


def test_c6_butterfly(report):
    e = 0.7
    a = math.sqrt(e)
    worst = 0.0
    for signs, k in CODESPACE_N4:
        for s in (1, -1):
            cw = ModeAmplitudes(s * a * np.array(signs, dtype=complex))
            target = np.zeros(4, dtype=complex)
            target[k] = s * 2 * a
            worst = max(worst, float(np.max(np.abs(hadamard_butterfly(cw).amps - target))))
            msg = Message(1, (k + 1,), (s,))
            worst = max(worst, float(np.max(np.abs(message_to_transmit_state(msg, e, 4).amps - cw.amps))))
    rng = np.random.default_rng(1)
    dense_err = 0.0
    for n in (2, 4, 8, 16, 32):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        ref = hadamard_matrix(n.bit_length() - 1) @ x / math.sqrt(n)
        dense_err = max(dense_err, float(np.max(np.abs(hadamard_butterfly(ModeAmplitudes(x)).amps - ref))))
    ok = worst <= 1e-12 and dense_err <= 1e-12
    report(6, ok, f"N=4 codewords err {worst:.1e}, dense H_N err {dense_err:.1e}")
    assert ok


CFG = dict(energy=0.1, n_modes=4, p=0.5, steps=10_000, trials=1_000_000, seed=0)


def test_c7_monte_carlo_vs_analytic(report):
    t0 = time.perf_counter()
    res = run_trials(SimConfig(**CFG))
    v = compare_with_table(res.table, build_conditional_table(0.1, 4), 5.0)
    ref = 4 * r_pppm_closed(0.1, 4, 0.5)
    dev = abs(res.mi - ref)
    dt = time.perf_counter() - t0
    ok = v.passed and dev <= 3 * res.mi_sigma and dt < 120.0
    report(7, ok, f"max |z| {v.max_sigma:.2f}, structural {v.structural_violations}, "
               f"MI {res.mi:.5f} vs {ref:.5f} ({dev / res.mi_sigma:.2f} sigma), {dt:.1f} s")
    assert ok


def test_c8_physical_lower_bound(report):
    paper = run_trials(SimConfig(**CFG))
    phys = run_trials(SimConfig(**CFG, dolinar_mode="physical"))
    ok = phys.mi >= paper.mi - 3 * paper.mi_sigma
    report(8, ok, f"physical MI {phys.mi:.5f} vs paper-model {paper.mi:.5f} +- {paper.mi_sigma:.5f}")
    assert ok


def test_c9_figure_level_ordering(report):
    t0 = time.perf_counter()
    wins = []
    below_holevo = True
    for e in np.logspace(math.log10(0.02), math.log10(0.2), 21):
        e = float(e)
        dol, hol = r_dolinar(e), r_holevo_bpsk(e)
        below_holevo &= dol < hol
        for n in (4, 8, 16, 32):
            had = r_hadamard(e, n)
            pppm = r_pppm_opt(e, n, check_mi=False).rate_bits_per_mode
            below_holevo &= max(had, pppm) < hol
            if pppm > max(had, dol):
                wins.append((round(e, 4), n))
    low = 1e-3
    had_low = {n: r_hadamard(low, n) for n in (2**k for k in range(1, 11))}
    below_holevo &= max(had_low.values()) < r_holevo_bpsk(low) and r_dolinar(low) < r_holevo_bpsk(low)
    had_wins = [n for n, r in had_low.items() if r > r_dolinar(low)]
    dt = time.perf_counter() - t0
    ok = bool(wins) and bool(had_wins) and below_holevo and dt < 120.0
    report(9, ok, f"(a) PPPM wins at {len(wins)} (E,N) points, e.g. {wins[:3]}; "
               f"(b) Hadamard beats Dolinar at E=1e-3 for N in {had_wins[:3]}...; "
               f"(c) below Holevo: {below_holevo}; {dt:.1f} s")
    assert ok


def _zoom_oracle(e, n):
    """Nested grid scan: 1e-4 steps, then 1e-6 and 1e-8 around the best cell."""
    lo, hi, step = 0.0, 1.0, 1e-4
    best = -np.inf
    while step >= 1e-8:
        g = np.clip(np.arange(lo, hi + step / 2, step), 0.0, 1.0)
        v = r_pppm_closed(e, n, g)
        k = int(np.argmax(v))
        best = max(best, float(v[k]))
        lo, hi, step = g[k] - step, g[k] + step, step / 100
    return best


def test_c10_optimizer(report):
    grid = np.linspace(0.0, 1.0, 10_001)
    worst_low = worst_high = literal = 0.0
    ends_ok = True
    for e in (0.02, 0.1, 0.5):
        for n in (4, 8, 16):
            res = r_pppm_opt(e, n, check_mi=False)
            coarse = float(np.max(r_pppm_closed(e, n, grid)))
            fine = _zoom_oracle(e, n)
            worst_low = max(worst_low, coarse - res.rate_bits_per_mode)
            worst_high = max(worst_high, abs(res.rate_bits_per_mode - fine))
            literal = max(literal, abs(res.rate_bits_per_mode - coarse))
            ends_ok &= res.rate_bits_per_mode >= max(r_pppm_closed(e, n, 0.0), r_pppm_closed(e, n, 1.0))
    ok = worst_low <= 1e-9 and worst_high <= 1e-9 and ends_ok
    report(10, ok, f"never below 1e-4 grid (deficit {worst_low:.1e}), |R* - zoomed grid| {worst_high:.1e}, "
                f"|R* - 1e-4 grid| {literal:.1e}, R* >= R(0), R(1): {ends_ok}")
    assert ok
