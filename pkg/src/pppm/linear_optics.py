"""Coherent-amplitude states and passive linear optics.

Under beam splitters, displacements and loss a multi-mode coherent state stays
a product of coherent states, so the vector of complex first moments describes
it completely. Mode indices in this module are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ModeAmplitudes:
    """N coherent amplitudes, in units of sqrt(photons)."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        if a.size == 0:
            raise ValueError("a state needs at least one mode")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def vacuum(cls, n_modes: int) -> ModeAmplitudes:
        return cls(np.zeros(n_modes, dtype=complex))

    @property
    def n_modes(self) -> int:
        return self.amps.size

    @property
    def energies(self) -> np.ndarray:
        """Mean photon number per mode."""
        return np.abs(self.amps) ** 2

    def __len__(self):
        return self.n_modes

    def __eq__(self, other):
        if not isinstance(other, ModeAmplitudes):
            return NotImplemented
        return self.n_modes == other.n_modes and bool(np.all(self.amps == other.amps))

    def allclose(self, other: ModeAmplitudes, atol: float = 1e-12) -> bool:
        return self.n_modes == other.n_modes and bool(
            np.allclose(self.amps, other.amps, rtol=0.0, atol=atol)
        )

    def _replace(self, amps: np.ndarray) -> ModeAmplitudes:
        return ModeAmplitudes(amps)


def _check_index(state: ModeAmplitudes, i: int) -> int:
    if not isinstance(i, (int, np.integer)) or not 0 <= i < state.n_modes:
        raise IndexError(f"mode index {i} out of range for {state.n_modes} modes")
    return int(i)


def _check_unit(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def beam_splitter(state: ModeAmplitudes, i: int, j: int, eta: float) -> ModeAmplitudes:
    """Mix modes i and j with transmissivity eta.

    (a_i, a_j) -> (sqrt(eta) a_i + sqrt(1-eta) a_j, -sqrt(1-eta) a_i + sqrt(eta) a_j)
    """
    i = _check_index(state, i)
    j = _check_index(state, j)
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    eta = _check_unit("eta", eta)
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    a = state.amps.copy()
    ai, aj = a[i], a[j]
    a[i] = t * ai + r * aj
    a[j] = -r * ai + t * aj
    return state._replace(a)


def displace(state: ModeAmplitudes, i: int, beta: complex) -> ModeAmplitudes:
    i = _check_index(state, i)
    a = state.amps.copy()
    a[i] += beta
    return state._replace(a)


def attenuate(state: ModeAmplitudes, i: int, kappa: float) -> ModeAmplitudes:
    """Keep a fraction kappa of the energy in mode i (amplitude scales by sqrt(kappa))."""
    i = _check_index(state, i)
    kappa = _check_unit("kappa", kappa)
    a = state.amps.copy()
    a[i] *= np.sqrt(kappa)
    return state._replace(a)


def total_energy(state: ModeAmplitudes) -> float:
    return float(np.sum(state.energies))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def walsh_hadamard(x: np.ndarray) -> np.ndarray:
    """Unnormalised Sylvester-ordered transform H_N @ x along the last axis.

    log2(N) butterfly stages; each pairs entries a distance h apart into
    (a + b, a - b).
    """
    x = np.asarray(x)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"transform length must be a power of two, got {n}")
    lead = x.shape[:-1]
    y = x.astype(np.result_type(x, float), copy=True)
    h = 1
    while h < n:
        y = y.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :]
        b = y[..., 1, :]
        y = np.stack((a + b, a - b), axis=-2).reshape(*lead, n)
        h *= 2
    return y


def hadamard_butterfly(state: ModeAmplitudes) -> ModeAmplitudes:
    """Apply the orthogonal network (1/sqrt(N)) H_N to the mode vector.

    Every stage is a layer of balanced two-mode mixes in the symmetric
    convention (a, b) -> ((a + b), (a - b)) / sqrt(2), which makes the
    whole transform its own inverse.
    """
    n = state.n_modes
    if n < 2 or not is_power_of_two(n):
        raise ValueError(f"butterfly needs a power-of-two number of modes >= 2, got {n}")
    return state._replace(walsh_hadamard(state.amps) / np.sqrt(n))
