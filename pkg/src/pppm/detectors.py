"""Analytic receiver statistics.

* Helstrom error of a +-alpha discrimination (Dolinar receiver, used as a
  black box).
* Vacuum-or-pulse (VP) detector: T taps of 1/T of the original energy each,
  then a Dolinar stage on whatever is left after the first click.
* Two-click statistics of the two-pulse decoder, in the T -> infinity limit
  and as exact finite-T double sums.

Energies are mean photon numbers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad, quad_vec

QUAD_TOL = 1e-10
# Two-click weight 2 e^{-s}(1 - e^{-s}) is below 1e-25 beyond this point.
_TAIL_CUTOFF = 60.0


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _check_energy(energy: float) -> float:
    energy = float(energy)
    if not energy >= 0.0:
        raise ValueError(f"energy must be non-negative, got {energy}")
    return energy


def helstrom_error(energy: float) -> float:
    """Minimum error probability for |alpha> vs |-alpha>, |alpha|^2 = energy."""
    energy = _check_energy(energy)
    return 0.5 * (1.0 - math.sqrt(-math.expm1(-4.0 * energy)))


def helstrom_error_array(energy: np.ndarray) -> np.ndarray:
    energy = np.asarray(energy, dtype=float)
    return 0.5 * (1.0 - np.sqrt(-np.expm1(-4.0 * energy)))


@dataclass(frozen=True)
class VpStats:
    p_same: float
    p_diff: float
    p_vac: float
    energy: float

    @property
    def p_click(self) -> float:
        return self.p_same + self.p_diff


@dataclass(frozen=True)
class TwoClickStats:
    p_s: float
    p_e: float
    p_nc: float
    energy_total: float

    @property
    def p_both(self) -> float:
        return self.p_s + self.p_e + self.p_nc


def _quad(f, a, b, what):
    val, err, info, *msg = quad(
        f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400, full_output=1
    )
    # ier 2/4 only flag that the requested tolerance was unreachable by roundoff
    if msg and info.get("ier", 0) not in (2, 4) or not err <= QUAD_TOL:
        raise QuadratureError(f"{what}: error estimate {err:.3g} ({msg[0] if msg else 'ok'})")
    return val


@lru_cache(maxsize=1 << 16)
def vp_probabilities(energy: float) -> VpStats:
    """T -> infinity VP statistics for an input |+-alpha>, |alpha|^2 = energy.

    p_same / p_diff integrate (1 +- sqrt(1 - e^{-4E}/t^4)) / 2 over
    t in [e^{-E}, 1]. The root vanishes like a square root at the lower
    limit; t = e^{w^2 - E} removes it and leaves the smooth integrands
    e^{w^2 - E} w (1 +- sqrt(1 - e^{-4 w^2})) on [0, sqrt(E)].
    """
    energy = _check_energy(energy)
    p_vac = math.exp(-energy)
    if energy == 0.0:
        return VpStats(0.0, 0.0, 1.0, 0.0)

    def same(w):
        return math.exp(w * w - energy) * w * (1.0 + math.sqrt(-math.expm1(-4.0 * w * w)))

    def diff(w):
        # 1 - sqrt(1 - r) without cancellation
        r = math.exp(-4.0 * w * w)
        return math.exp(w * w - energy) * w * r / (1.0 + math.sqrt(1.0 - r))

    top = math.sqrt(energy)
    p_same = _quad(same, 0.0, top, f"P_VP(+|+) at E={energy}")
    p_diff = _quad(diff, 0.0, top, f"P_VP(-|+) at E={energy}")
    return VpStats(min(p_same, 1.0), min(p_diff, 1.0), p_vac, energy)


def vp_probabilities_finite_T(energy: float, steps: int) -> VpStats:
    """VP statistics with exactly ``steps`` taps.

    Sum over the tap t of the first click, (1 - e^{-E/T}) e^{-(t-1)E/T},
    times the Dolinar success (or error) on the remaining E (T - t) / T.
    """
    energy = _check_energy(energy)
    if steps < 1:
        raise ValueError("need at least one tap")
    if energy == 0.0:
        return VpStats(0.0, 0.0, 1.0, 0.0)
    t = np.arange(1, steps + 1, dtype=float)
    click = -math.expm1(-energy / steps) * np.exp(-(t - 1.0) * energy / steps)
    err = helstrom_error_array(energy * (steps - t) / steps)
    return VpStats(
        float(np.sum(click * (1.0 - err))),
        float(np.sum(click * err)),
        math.exp(-energy),
        energy,
    )


def _no_click_both(mu: float) -> float:
    """Closed form of the Error-1 integral, 2 e^{-mu} ((1 - e^{-mu}) - mu e^{-mu})."""
    if mu < 1e-4:
        # series of 2 e^{-2 mu} (e^mu - 1 - mu) to avoid cancellation
        return 2.0 * math.exp(-2.0 * mu) * (mu**2 / 2 + mu**3 / 6 + mu**4 / 24)
    return 2.0 * math.exp(-mu) * (-math.expm1(-mu) - mu * math.exp(-mu))


@lru_cache(maxsize=1 << 12)
def two_click_probabilities(energy: float, n_modes: int) -> TwoClickStats:
    """T -> infinity limit of the two-click double sums.

    With the per-pulse energy mu = N E / 2 and s = mu * t2 / T, the first
    click time integrates out analytically and what is left is

        P_S = int_0^mu 2 e^{-s} (1 - e^{-s}) P_VP(+|+; 2 (mu - s)) ds

    (P_E likewise with P_VP(-|+)). P_nc replaces P_VP by the no-click weight
    e^{-2 (mu - s)}, which integrates in closed form.
    """
    energy = _check_energy(energy)
    if n_modes < 2:
        raise ValueError("need at least two modes")
    total = n_modes * energy
    mu = total / 2.0
    if mu == 0.0:
        return TwoClickStats(0.0, 0.0, 0.0, 0.0)

    def integrand(s):
        vp = vp_probabilities(max(0.0, 2.0 * (mu - s)))
        w = 2.0 * math.exp(-s) * -math.expm1(-s)
        return np.array((w * vp.p_same, w * vp.p_diff))

    upper = min(mu, _TAIL_CUTOFF)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            res, err, info = quad_vec(
                integrand, 0.0, upper, epsabs=1e-12, epsrel=1e-11, norm="max",
                limit=500, full_output=True,
            )
        except IntegrationWarning as exc:
            raise QuadratureError(f"two-click integral at E={energy}, N={n_modes}: {exc}") from None
    if not info.success or not err <= 10 * QUAD_TOL:
        raise QuadratureError(
            f"two-click integral at E={energy}, N={n_modes}: error estimate {err:.3g}"
        )
    p_s, p_e = np.clip(res, 0.0, 1.0)  # roundoff can overshoot 1 at large mu
    return TwoClickStats(float(p_s), float(p_e), _no_click_both(mu), total)


def two_click_probabilities_finite_T(energy: float, n_modes: int, steps: int) -> TwoClickStats:
    """Exact finite-T double sums over first-click taps t1 < t2.

    Each term is 2 (1 - e^{-mu/T})^2 e^{-(t1 + t2 - 2) mu / T} times the
    final-stage factor at remaining energy N E (T - t2) / T. The inner t1
    sum is accumulated with a running sum per t2.
    """
    energy = _check_energy(energy)
    if steps < 2:
        raise ValueError("need at least two taps")
    total = n_modes * energy
    mu = total / 2.0
    if mu == 0.0:
        return TwoClickStats(0.0, 0.0, 0.0, 0.0)
    T = steps
    decay = np.exp(-np.arange(T, dtype=float) * mu / T)  # e^{-(t-1) mu/T}, t = 1..T
    inner = np.cumsum(decay)[:-1]  # sum over t1 = 1..t2-1, for t2 = 2..T
    t2 = np.arange(2, T + 1)
    weight = 2.0 * math.expm1(-mu / T) ** 2 * decay[1:] * inner
    remaining = total * (T - t2) / T
    vp = [vp_probabilities(float(e)) for e in remaining]
    p_same = np.fromiter((v.p_same for v in vp), float, len(vp))
    p_diff = np.fromiter((v.p_diff for v in vp), float, len(vp))
    return TwoClickStats(
        float(np.sum(weight * p_same)),
        float(np.sum(weight * p_diff)),
        float(np.sum(weight * np.exp(-remaining))),
        total,
    )
