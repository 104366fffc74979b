"""Seeded Monte Carlo of the PPPM receiver.

Per trial, every mode runs a T-tap VP detector in lockstep. The first click
freezes its mode. A lone click hands the frozen remainder to a Dolinar
stage. A second click triggers attenuation of the frozen mode, a balanced
beam splitter and a final VP + Dolinar stage on the two outputs. Dolinar
verdicts are drawn from Helstrom statistics.

Randomness: trial ``t`` of message ``m`` reads row ``t`` of a Philox stream
keyed by ``(seed, m + 1)``; stream 0 is reserved for the message allocation.
Results therefore depend only on the configuration, never on scheduling.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..codebook import (
    Message,
    check_modes,
    enumerate_messages,
    message_index,
    message_to_transmit_state,
    n_pairs,
    pair_index,
    prior_vector,
)
from ..detectors import helstrom_error
from ..linear_optics import ModeAmplitudes, attenuate, beam_splitter, hadamard_butterfly
from ..rates import ConditionalTable, OutcomeSymbol, enumerate_outcomes, n_outcomes
from . import kernels

MODES = ("paper-model", "physical")
ALLOCATIONS = ("prior", "exhaustive")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    energy: float
    n_modes: int
    p: float = 0.5
    steps: int = 10_000
    trials: int = 1_000_000
    seed: int = 0
    dolinar_mode: str = "paper-model"
    allocation: str = "prior"

    def __post_init__(self):
        check_modes(self.n_modes)
        if not self.energy >= 0:
            raise ValueError("energy must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.steps < 2:
            raise ValueError("need at least two VP taps")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.dolinar_mode not in MODES:
            raise ValueError(f"dolinar_mode must be one of {MODES}")
        if self.allocation not in ALLOCATIONS:
            raise ValueError(f"allocation must be one of {ALLOCATIONS}")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)


def _stream(seed: int, stream: int) -> np.random.Philox:
    return np.random.Philox(key=(seed & _MASK64) | (stream << 64))


def trial_rng(seed: int, msg_index: int, trial_index: int, n_modes: int) -> np.random.Generator:
    """Generator positioned at the first draw of one trial."""
    bg = _stream(seed, msg_index + 1)
    bg.advance(trial_index * kernels.slots_per_trial(n_modes) // 4)
    return np.random.Generator(bg)


def trial_uniforms(seed: int, msg_index: int, start: int, count: int, n_modes: int) -> np.ndarray:
    slots = kernels.slots_per_trial(n_modes)
    return trial_rng(seed, msg_index, start, n_modes).random((count, slots))


# --------------------------------------------------------------------------
# single-trial reference


def _first_click(u: float, energy: float, steps: int) -> int | None:
    if energy <= 0.0:
        return None
    x = -math.log1p(-u) * steps / energy
    return math.floor(x) + 1 if x < steps else None


def sample_first_click(energy: float, steps: int, rng: np.random.Generator) -> int | None:
    """Tap (1..T) of the first click of a VP detector, or None.

    Each tap carries energy/steps, so the click CDF after t taps is
    1 - exp(-energy t / steps); inverse-CDF sampling from one uniform.
    """
    if energy < 0:
        raise ValueError("energy must be non-negative")
    return _first_click(rng.random(), energy, steps)


def _dolinar(u: float, energy: float, true_sign: int) -> int:
    return true_sign if u < 1.0 - helstrom_error(energy) else -true_sign


def dolinar_sample(energy: float, true_sign: int, rng: np.random.Generator) -> int:
    """Sign verdict, correct with probability 1 - P_Hel(energy)."""
    return _dolinar(rng.random(), energy, true_sign)


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def decode_trial(msg: Message, cfg: SimConfig, rng: np.random.Generator) -> OutcomeSymbol:
    """Run the receiver once on ``msg`` and return the decoded outcome.

    Reads one row of uniforms from ``rng`` in the kernel slot layout, so with
    ``trial_rng`` it reproduces the batch kernels trial for trial.
    """
    N, T = cfg.n_modes, cfg.steps
    u = rng.random(kernels.slots_per_trial(N))
    state = hadamard_butterfly(message_to_transmit_state(msg, cfg.energy, N))
    amps = state.amps.real
    energy = state.energies

    clicks = sorted(
        (t, m) for m in range(N) if (t := _first_click(u[m], energy[m], T)) is not None
    )
    if not clicks:
        return OutcomeSymbol("error2")

    t1, i = clicks[0]
    if len(clicks) == 1:
        if cfg.dolinar_mode == "paper-model" and msg.n_pulses == 2:
            sign = 1 if u[N] < 0.5 else -1
        else:
            sign = _dolinar(u[N], energy[i] * (T - t1) / T, _sign(amps[i]))
        return OutcomeSymbol("one-pulse", (i + 1,), (sign,))

    t2, j = clicks[1]
    # what is left of both modes after the second click
    frozen = np.zeros(N, dtype=complex)
    frozen[i] = amps[i] * math.sqrt((T - t1) / T)
    frozen[j] = amps[j] * math.sqrt((T - t2) / T)
    st = ModeAmplitudes(frozen)
    st = attenuate(st, i, (T - t2) / (T - t1) if t1 < T else 0.0)
    st = beam_splitter(st, i, j, 0.5)
    out = st.amps.real
    c_i = _first_click(u[N + 1], out[i] ** 2, T)
    c_j = _first_click(u[N + 2], out[j] ** 2, T)
    lo, hi = min(i, j), max(i, j)
    if c_i is None and c_j is None:
        return OutcomeSymbol("error1", (lo + 1, hi + 1))
    use_j = c_j is not None and (c_i is None or c_j < c_i)
    m, tc = (j, c_j) if use_j else (i, c_i)
    sigma = _dolinar(u[N + 3], out[m] ** 2 * (T - tc) / T, _sign(out[m]))
    # output i carries a_i + a_j (equal signs), output j carries a_j - a_i
    s = {i: -sigma if use_j else sigma, j: sigma}
    return OutcomeSymbol("two-pulse", (lo + 1, hi + 1), (s[lo], s[hi]))


def outcome_index(y: OutcomeSymbol, n_modes: int) -> int:
    N = n_modes
    if y.kind == "error2":
        return 2 * N + 5 * n_pairs(N)
    if y.kind == "one-pulse":
        return 2 * (y.positions[0] - 1) + (y.signs[0] < 0)
    pidx = pair_index(y.positions[0] - 1, y.positions[1] - 1, N)
    if y.kind == "error1":
        return 2 * N + 4 * n_pairs(N) + pidx
    return 2 * N + 4 * pidx + 2 * (y.signs[0] < 0) + (y.signs[1] < 0)


# --------------------------------------------------------------------------
# batch runs


@dataclass(frozen=True, eq=False)
class EmpiricalTable:
    counts: np.ndarray  # (messages, outcomes) int64
    trials_per_message: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EmpiricalTable):
            return NotImplemented
        return np.array_equal(self.counts, other.counts) and np.array_equal(
            self.trials_per_message, other.trials_per_message
        )

    def frequencies(self) -> np.ndarray:
        n = np.maximum(self.trials_per_message, 1)[:, None]
        return self.counts / n

    def rows(self):
        """(message id, outcome id, count) for every non-zero cell."""
        r, c = np.nonzero(self.counts)
        for a, b in zip(r.tolist(), c.tolist()):
            yield a, b, int(self.counts[a, b])


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    table: EmpiricalTable
    mi: float
    mi_sigma: float
    backend: str


def allocate_trials(cfg: SimConfig) -> np.ndarray:
    n_msg = 2 * cfg.n_modes + 4 * n_pairs(cfg.n_modes)
    if cfg.allocation == "exhaustive":
        base, extra = divmod(cfg.trials, n_msg)
        return np.array([base + (k < extra) for k in range(n_msg)], dtype=np.int64)
    prior = prior_vector(cfg.p, cfg.n_modes)
    rng = np.random.Generator(_stream(cfg.seed, 0))
    return rng.multinomial(cfg.trials, prior / prior.sum()).astype(np.int64)


def _run_message(cfg: SimConfig, k: int, msg: Message, n_trials: int, decode, chunk: int) -> np.ndarray:
    counts = np.zeros(n_outcomes(cfg.n_modes), dtype=np.int64)
    if n_trials == 0:
        return counts
    pulse = hadamard_butterfly(message_to_transmit_state(msg, cfg.energy, cfg.n_modes))
    amps = np.ascontiguousarray(pulse.amps.real)
    paper = cfg.dolinar_mode == "paper-model"
    for start in range(0, n_trials, chunk):
        m = min(chunk, n_trials - start)
        u = trial_uniforms(cfg.seed, k, start, m, cfg.n_modes)
        out = np.empty(m, dtype=np.int64)
        decode(amps, msg.n_pulses == 2, paper, cfg.steps, u, out)
        counts += np.bincount(out, minlength=counts.size)
    return counts


def run_trials(cfg: SimConfig, workers: int = 1, backend: str | None = None, chunk: int = 1 << 16) -> SimResult:
    """Simulate ``cfg.trials`` transmissions and tally decoder outcomes."""
    if backend is None:
        decode, name = kernels.decode_block, kernels.BACKEND
    elif backend == "python":
        decode, name = kernels.python_decode_block, "python"
    elif backend == "cython":
        if kernels.compiled_decode_block is None:
            raise RuntimeError("compiled kernel not built")
        decode, name = kernels.compiled_decode_block, "cython"
    else:
        raise ValueError(f"unknown backend {backend!r}")
    messages = enumerate_messages(cfg.n_modes)
    alloc = allocate_trials(cfg)
    jobs = [(k, m, int(alloc[k])) for k, m in enumerate(messages)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda a: _run_message(cfg, *a, decode, chunk), jobs))
    else:
        rows = [_run_message(cfg, *a, decode, chunk) for a in jobs]
    table = EmpiricalTable(np.vstack(rows), alloc)
    prior = prior_vector(cfg.p, cfg.n_modes)
    mi, sigma = empirical_mutual_information(prior, table)
    return SimResult(cfg, table, mi, sigma, name)


def empirical_mutual_information(prior: np.ndarray, table: EmpiricalTable) -> tuple[float, float]:
    """Plug-in I(X;Y) from estimated rows under the known prior, with a
    delta-method standard error.

    With multinomial rows, dI/dq(y|x) = P(x) log2(q(y|x)/P(y)), so
    Var I = sum_x P(x)^2 Var_{y~q_x}[log2(q(y|x)/P(y))] / n_x.
    """
    prior = np.asarray(prior, dtype=float)
    n_x = table.trials_per_message
    used = (prior > 0) & (n_x > 0)
    if not np.any(used):
        return 0.0, 0.0
    w = prior * used
    w = w / w.sum()
    q = table.frequencies()
    py = w @ q
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.where(q > 0, np.log2(q / py), 0.0)
    per_row = np.sum(q * lr, axis=1)
    mi = max(0.0, float(np.sum(w * per_row)))
    var_rows = np.sum(q * lr**2, axis=1) - per_row**2
    var = np.sum(np.where(used, w**2 * np.maximum(var_rows, 0.0) / np.maximum(n_x, 1), 0.0))
    return mi, float(math.sqrt(var))


@dataclass(frozen=True)
class Validation:
    z: np.ndarray  # (messages, outcomes) signed deviations in binomial sigmas
    max_sigma: float
    threshold: float
    structural_violations: int

    @property
    def passed(self) -> bool:
        return self.structural_violations == 0 and self.max_sigma <= self.threshold


def compare_with_table(emp: EmpiricalTable, table: ConditionalTable, threshold: float = 5.0) -> Validation:
    """Per-cell binomial z-scores of empirical frequencies against P(y|x).

    Cells with zero analytic probability must stay empty; they are counted
    as structural violations instead of entering the z-scores.
    """
    q = table.dense()
    n = emp.trials_per_message[:, None].astype(float)
    f = emp.frequencies()
    sd = np.sqrt(q * (1.0 - q) / np.maximum(n, 1.0))
    active = (n > 0) & (q > 0)
    z = np.zeros_like(q)
    np.divide(f - q, sd, out=z, where=active & (sd > 0))
    structural = int(np.sum((q == 0) & (emp.counts > 0)))
    max_sigma = float(np.max(np.abs(z))) if z.size else 0.0
    return Validation(z, max_sigma, threshold, structural)


__all__ = [
    "SimConfig",
    "EmpiricalTable",
    "SimResult",
    "Validation",
    "sample_first_click",
    "dolinar_sample",
    "decode_trial",
    "outcome_index",
    "run_trials",
    "trial_rng",
    "trial_uniforms",
    "allocate_trials",
    "empirical_mutual_information",
    "compare_with_table",
    "enumerate_outcomes",
    "message_index",
]
