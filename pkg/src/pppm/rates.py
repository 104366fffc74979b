"""Information rates: baselines, the PPPM channel table and its closed form.

All rates are in bits per mode (per channel use); logarithms are base 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar

from .codebook import SIGN_PAIRS, check_modes, n_messages, pair_index, prior_vector
from .detectors import helstrom_error, two_click_probabilities, vp_probabilities


def h1(x: float) -> float:
    """-x log2 x, with h1(0) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"h1 needs a probability, got {x}")
    return 0.0 if x == 0.0 else -x * math.log2(x)


def h2(x: float) -> float:
    """Binary entropy h1(x) + h1(1 - x)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"h2 needs a probability, got {x}")
    return h1(x) + h1(1.0 - x)


def _h1v(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, -x * np.log2(safe), 0.0)


def r_dolinar(energy: float) -> float:
    """Symbol-by-symbol BPSK rate with a Helstrom-optimal receiver on each mode."""
    return 1.0 - h2(helstrom_error(energy))


def r_holevo_bpsk(energy: float) -> float:
    if energy < 0:
        raise ValueError("energy must be non-negative")
    return h2(-math.expm1(-2.0 * energy) / 2.0)


def r_hadamard(energy: float, n_modes: int) -> float:
    n = check_modes(n_modes)
    vp = vp_probabilities(n * energy)
    detect = -math.expm1(-n * energy)
    return 2.0 * (h1(detect / (2 * n)) - (h1(vp.p_same) + h1(vp.p_diff)) / (2 * n))


# --------------------------------------------------------------------------
# channel table


@dataclass(frozen=True)
class OutcomeSymbol:
    """Decoder output. Positions are 1-based like message positions."""

    kind: str  # "one-pulse", "two-pulse", "error1", "error2"
    positions: tuple[int, ...] = ()
    signs: tuple[int, ...] = ()

    def label(self) -> str:
        signs = "".join("+" if s > 0 else "-" for s in self.signs)
        if self.kind == "error2":
            return "E2"
        if self.kind == "error1":
            return f"E1{self.positions}"
        return f"{self.positions}{signs}"


def n_outcomes(n_modes: int) -> int:
    c = comb(n_modes, 2)
    return 2 * n_modes + 4 * c + c + 1


def enumerate_outcomes(n_modes: int) -> list[OutcomeSymbol]:
    """Canonical outcome order: one-pulse guesses, two-pulse guesses (same
    order as the messages), Error-1 per position pair, Error-2 last."""
    n = check_modes(n_modes)
    out = [OutcomeSymbol("one-pulse", (k,), (s,)) for k in range(1, n + 1) for s in (1, -1)]
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    out += [OutcomeSymbol("two-pulse", pr, sp) for pr in pairs for sp in SIGN_PAIRS]
    out += [OutcomeSymbol("error1", pr) for pr in pairs]
    out.append(OutcomeSymbol("error2"))
    return out


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """P(y|x) over canonical messages (rows) and outcomes (columns)."""

    n_modes: int
    energy: float
    matrix: sparse.csr_array

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def row(self, k: int) -> np.ndarray:
        return self.matrix[[k], :].toarray().ravel()


def build_conditional_table(energy: float, n_modes: int, solo_click: str = "coin") -> ConditionalTable:
    """Channel from PPPM messages to decoder outcomes.

    ``solo_click`` sets what a lone first-stage click on a two-pulse input
    reports as sign: ``"coin"`` is the fair-coin model behind the closed-form
    rate, ``"dolinar"`` keeps the Dolinar verdict on the clicked pulse (the
    physical receiver), which can only add information.
    """
    if solo_click not in ("coin", "dolinar"):
        raise ValueError("solo_click must be 'coin' or 'dolinar'")
    n = check_modes(n_modes)
    c = comb(n, 2)
    total = n * energy
    vp = vp_probabilities(total)
    tc = two_click_probabilities(energy, n)
    miss = math.exp(-total)
    half_click = -math.expm1(-total / 2.0)
    half_miss = math.exp(-total / 2.0)
    err2_col = 2 * n + 5 * c

    rows, cols, vals = [], [], []

    def put(r, col, v):
        if v != 0.0:
            rows.append(r)
            cols.append(col)
            vals.append(v)

    for k in range(n):
        for si in range(2):
            r = 2 * k + si
            put(r, 2 * k + si, vp.p_same)
            put(r, 2 * k + 1 - si, vp.p_diff)
            put(r, err2_col, miss)

    if solo_click == "coin":
        solo_right = solo_wrong = 0.5 * half_click * half_miss
    else:
        half_vp = vp_probabilities(total / 2.0)
        solo_right = half_miss * half_vp.p_same
        solo_wrong = half_miss * half_vp.p_diff

    for i in range(n):
        for j in range(i + 1, n):
            pidx = pair_index(i, j, n)
            for spi, sp in enumerate(SIGN_PAIRS):
                r = 2 * n + 4 * pidx + spi
                for k, s in ((i, sp[0]), (j, sp[1])):
                    put(r, 2 * k + (s < 0), solo_right)
                    put(r, 2 * k + (s > 0), solo_wrong)
                put(r, 2 * n + 4 * pidx + spi, tc.p_s)
                put(r, 2 * n + 4 * pidx + (3 - spi), tc.p_e)  # both signs flipped
                put(r, 2 * n + 4 * c + pidx, tc.p_nc)
                put(r, err2_col, miss)

    m = sparse.coo_array(
        (np.array(vals), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(n_messages(n), n_outcomes(n)),
    ).tocsr()
    return ConditionalTable(n, float(energy), m)


def hadamard_table(energy: float, n_modes: int) -> np.ndarray:
    """2N one-pulse inputs to 2N sign/position guesses plus one no-click outcome."""
    n = check_modes(n_modes)
    vp = vp_probabilities(n * energy)
    w = np.zeros((2 * n, 2 * n + 1))
    for k in range(n):
        for si in range(2):
            w[2 * k + si, 2 * k + si] = vp.p_same
            w[2 * k + si, 2 * k + 1 - si] = vp.p_diff
    w[:, -1] = math.exp(-n * energy)
    return w


def mutual_information(prior, table) -> float:
    """I(X;Y) in bits for a prior over rows of a row-stochastic table.

    ``table`` may be a :class:`ConditionalTable`, a dense array or a scipy
    sparse matrix.
    """
    if isinstance(table, ConditionalTable):
        table = table.matrix
    prior = np.asarray(prior, dtype=float)
    w = sparse.coo_array(table)
    if prior.ndim != 1 or prior.size != w.shape[0]:
        raise ValueError(f"prior of length {prior.size} does not match {w.shape[0]} table rows")
    if np.any(prior < 0) or abs(prior.sum() - 1.0) > 1e-9:
        raise ValueError("prior must be a probability vector")
    keep = (w.data > 0) & (prior[w.row] > 0)
    r, c, q = w.row[keep], w.col[keep], w.data[keep]
    py = np.bincount(c, weights=prior[r] * q, minlength=w.shape[1])
    return float(np.sum(prior[r] * q * np.log2(q / py[c])))


# --------------------------------------------------------------------------
# closed form and optimisation


def _pppm_terms(energy: float, n_modes: int):
    n = check_modes(n_modes)
    total = n * energy
    return (
        n,
        comb(n, 2),
        -math.expm1(-total),
        vp_probabilities(total),
        -math.expm1(-total / 2.0) * math.exp(-total / 2.0),
        two_click_probabilities(energy, n),
    )


def r_pppm_closed(energy: float, n_modes: int, p):
    """Closed-form PPPM rate; ``p`` (one-pulse probability) may be an array.

    Each bracket is H(Y) restricted to one outcome class minus the matching
    part of H(Y|X). The no-click outcome is common to every input and
    cancels. The Error-1 conditional-entropy term is the prior mass of the
    two-pulse class times h1(P_nc).
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    n, c, detect, vp, solo, tc = _pppm_terms(energy, n_modes)
    q = 1.0 - p
    one = 2 * n * (
        _h1v(p * detect / (2 * n) + q * (2 / n) * solo / 2)
        - p / (2 * n) * (h1(vp.p_same) + h1(vp.p_diff))
        - q * (2 / n) * h1(solo / 2)
    )
    two = 4 * c * _h1v(q * (tc.p_s + tc.p_e) / (4 * c)) - q * (h1(tc.p_s) + h1(tc.p_e))
    err1 = c * _h1v(q * tc.p_nc / c) - q * h1(tc.p_nc)
    rate = (one + two + err1) / n
    return float(rate) if rate.ndim == 0 else rate


@dataclass(frozen=True)
class RateResult:
    rate_bits_per_mode: float
    p_opt: float
    mi_residual: float | None = None


def _golden_refine(f, lo, hi, tol=1e-10):
    res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(res.x), float(-res.fun)


def r_pppm_opt(energy: float, n_modes: int, grid_step: float = 0.01, check_mi: bool | None = None) -> RateResult:
    """Maximise the closed-form rate over p in [0, 1].

    A coarse grid locates the best cell; a bounded golden-section/Brent
    search refines inside the two neighbouring cells. ``check_mi`` (default:
    only for N <= 64) also rebuilds the channel table at the optimum and
    records |N R - I(X;Y)|.
    """
    n = check_modes(n_modes)
    grid = np.linspace(0.0, 1.0, int(round(1.0 / grid_step)) + 1)
    vals = r_pppm_closed(energy, n, grid)
    k = int(np.argmax(vals))
    best_p, best_r = float(grid[k]), float(vals[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    p_ref, r_ref = _golden_refine(lambda x: r_pppm_closed(energy, n, x), lo, hi)
    if r_ref > best_r:
        best_p, best_r = p_ref, r_ref
    if check_mi is None:
        check_mi = n <= 64
    residual = None
    if check_mi:
        table = build_conditional_table(energy, n)
        residual = abs(n * best_r - mutual_information(prior_vector(best_p, n), table))
    return RateResult(best_r, best_p, residual)
