"""Hadamard matrices and the one-/two-pulse message set.

Messages follow a fixed canonical order so that conditional tables, CSV
dumps and Monte Carlo tallies line up index by index:

* the 2N one-pulse messages, by position then sign (+ before -);
* the 4 C(N,2) two-pulse messages, by position pair (lexicographic) then
  sign pair in the order ++, +-, -+, --.

Positions inside :class:`Message` are 1-based, as in the usual |k, s, E, N>
notation; mode indices of :class:`~pppm.linear_optics.ModeAmplitudes` are
0-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .linear_optics import ModeAmplitudes, hadamard_butterfly, is_power_of_two

MAX_EXPONENT = 16
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def hadamard_matrix(n: int, max_exponent: int = MAX_EXPONENT) -> np.ndarray:
    """Sylvester Hadamard matrix of size 2**n as an int64 array."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"exponent must be a non-negative integer, got {n!r}")
    if n > max_exponent:
        raise ValueError(f"2**{n} exceeds the size cap 2**{max_exponent}")
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        h = np.block([[h, h], [h, -h]])
    return h


def n_pairs(n_modes: int) -> int:
    return comb(n_modes, 2)


def n_messages(n_modes: int) -> int:
    return 4 * comb(n_modes, 2) + 2 * n_modes


def pair_index(i: int, j: int, n_modes: int) -> int:
    """Lexicographic rank of the 0-based pair i < j."""
    return i * n_modes - i * (i + 1) // 2 + (j - i - 1)


def check_modes(n_modes: int) -> int:
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 2 or not is_power_of_two(int(n_modes)):
        raise ValueError(f"number of modes must be a power of two >= 2, got {n_modes!r}")
    return int(n_modes)


@dataclass(frozen=True)
class Message:
    n_pulses: int
    positions: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if self.n_pulses not in (1, 2):
            raise ValueError("a message carries one or two pulses")
        if len(self.positions) != self.n_pulses or len(self.signs) != self.n_pulses:
            raise ValueError("positions and signs must match the pulse count")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if any(p < 1 for p in self.positions):
            raise ValueError("positions are 1-based")
        if self.n_pulses == 2 and not self.positions[0] < self.positions[1]:
            raise ValueError("two-pulse positions must be strictly increasing")

    @property
    def kind(self) -> str:
        return "one-pulse" if self.n_pulses == 1 else "two-pulse"

    def label(self) -> str:
        signs = "".join("+" if s > 0 else "-" for s in self.signs)
        if self.n_pulses == 1:
            return f"|{self.positions[0]},{signs}>"
        return f"|({self.positions[0]},{self.positions[1]}),({signs[0]},{signs[1]})>"

    def check(self, n_modes: int) -> None:
        if max(self.positions) > n_modes:
            raise ValueError(f"{self.label()} does not fit in {n_modes} modes")


@lru_cache(maxsize=64)
def _enumerate(n_modes: int) -> tuple[Message, ...]:
    out = [Message(1, (k,), (s,)) for k in range(1, n_modes + 1) for s in (1, -1)]
    for i in range(1, n_modes + 1):
        for j in range(i + 1, n_modes + 1):
            out.extend(Message(2, (i, j), sp) for sp in SIGN_PAIRS)
    return tuple(out)


def enumerate_messages(n_modes: int) -> list[Message]:
    return list(_enumerate(check_modes(n_modes)))


def message_index(msg: Message, n_modes: int) -> int:
    """Position of ``msg`` in the canonical order (no list scan)."""
    msg.check(n_modes)
    if msg.n_pulses == 1:
        return 2 * (msg.positions[0] - 1) + (msg.signs[0] < 0)
    i, j = msg.positions[0] - 1, msg.positions[1] - 1
    return 2 * n_modes + 4 * pair_index(i, j, n_modes) + SIGN_PAIRS.index(msg.signs)


def message_to_pulse_state(msg: Message, energy: float, n_modes: int) -> ModeAmplitudes:
    """Pulse-basis state: total energy N*E split evenly over the message's pulses."""
    if energy < 0:
        raise ValueError("energy must be non-negative")
    msg.check(n_modes)
    amp = np.sqrt(n_modes * energy / msg.n_pulses)
    a = np.zeros(n_modes, dtype=complex)
    for k, s in zip(msg.positions, msg.signs):
        a[k - 1] = s * amp
    return ModeAmplitudes(a)


def message_to_transmit_state(msg: Message, energy: float, n_modes: int) -> ModeAmplitudes:
    """State before the butterfly network.

    The network is an involution, so the pre-image of a pulse state is its
    forward transform. One-pulse messages give BPSK words (+-sqrt(E) per mode);
    two-pulse messages give entries in {0, +-sqrt(2E)}.
    """
    return hadamard_butterfly(message_to_pulse_state(msg, energy, n_modes))


def message_prior(msg: Message, p: float, n_modes: int) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if msg.n_pulses == 1:
        return p / (2 * n_modes)
    return (1.0 - p) / (4 * comb(n_modes, 2))


def prior_vector(p: float, n_modes: int) -> np.ndarray:
    """Priors of all messages in canonical order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    n_one = 2 * n_modes
    n_two = 4 * comb(n_modes, 2)
    return np.concatenate(
        (np.full(n_one, p / n_one), np.full(n_two, (1.0 - p) / n_two))
    )


@dataclass(frozen=True)
class Codebook:
    n_modes: int
    per_mode_energy: float
    messages: tuple[Message, ...] = field(repr=False)

    @classmethod
    def build(cls, n_modes: int, per_mode_energy: float) -> Codebook:
        if per_mode_energy < 0:
            raise ValueError("energy must be non-negative")
        n = check_modes(n_modes)
        return cls(n, float(per_mode_energy), _enumerate(n))

    def __len__(self):
        return len(self.messages)

    def pulse_states(self) -> list[ModeAmplitudes]:
        return [message_to_pulse_state(m, self.per_mode_energy, self.n_modes) for m in self.messages]

    def transmit_states(self) -> list[ModeAmplitudes]:
        return [message_to_transmit_state(m, self.per_mode_energy, self.n_modes) for m in self.messages]

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "per_mode_energy": self.per_mode_energy,
            "n_messages": len(self.messages),
            "messages": [
                {
                    "id": k,
                    "class": m.kind,
                    "positions": list(m.positions),
                    "signs": ["+" if s > 0 else "-" for s in m.signs],
                }
                for k, m in enumerate(self.messages)
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def messages_from_json(text: str) -> list[Message]:
    data = json.loads(text)
    out: list[Message] = []
    for rec in data["messages"]:
        signs: Sequence[int] = tuple(1 if s == "+" else -1 for s in rec["signs"])
        out.append(Message(len(rec["positions"]), tuple(rec["positions"]), tuple(signs)))
    return out
