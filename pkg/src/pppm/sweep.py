"""Energy sweeps of all rates and their CSV form."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .codebook import check_modes
from .rates import r_dolinar, r_hadamard, r_holevo_bpsk, r_pppm_opt
from .svg import fmt


@dataclass(frozen=True)
class SweepRecord:
    energy: float
    n_modes: int
    p_opt: float
    r_holevo: float
    r_dolinar: float
    r_hadamard: float
    r_pppm: float


COLUMNS = tuple(f.name for f in fields(SweepRecord))
RATE_COLUMNS = ("r_holevo", "r_dolinar", "r_hadamard", "r_pppm")
# columns that do not depend on the number of modes
SHARED_COLUMNS = ("r_holevo", "r_dolinar")


def energy_grid(emin: float, emax: float, points: int, scale: str = "log") -> np.ndarray:
    if points < 2:
        raise ValueError("need at least two points")
    if not emax > emin:
        raise ValueError("emax must exceed emin")
    if scale == "log":
        if emin <= 0:
            raise ValueError("log grids need emin > 0")
        return np.logspace(np.log10(emin), np.log10(emax), points)
    if scale == "linear":
        if emin < 0:
            raise ValueError("energies must be non-negative")
        return np.linspace(emin, emax, points)
    raise ValueError(f"unknown scale {scale!r}")


def sweep_point(energy: float, n_modes: int) -> SweepRecord:
    opt = r_pppm_opt(energy, n_modes, check_mi=False)
    return SweepRecord(
        float(energy),
        int(n_modes),
        opt.p_opt,
        r_holevo_bpsk(energy),
        r_dolinar(energy),
        r_hadamard(energy, n_modes),
        opt.rate_bits_per_mode,
    )


def _point(args):
    return sweep_point(*args)


def run_sweep(n_list, energies, workers: int = 1) -> list[SweepRecord]:
    """One record per (N, E), N-major then ascending energy."""
    jobs = [(float(e), check_modes(n)) for n in n_list for e in sorted(energies)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_point, jobs))
    return [sweep_point(*j) for j in jobs]


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in astuple(r)])
    return buf.getvalue()


def from_csv(text: str) -> list[SweepRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ValueError(f"expected header {','.join(COLUMNS)}")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise ValueError(f"line {k}: expected {len(COLUMNS)} fields")
        try:
            out.append(
                SweepRecord(float(row[0]), int(row[1]), *(float(v) for v in row[2:]))
            )
        except ValueError as exc:
            raise ValueError(f"line {k}: {exc}") from None
    return out


def plot_series(records, columns) -> list[tuple[str, list[float], list[float]]]:
    """Polylines for the chosen rate columns.

    With one N in the data each column gives one line labelled by its name;
    with several, N-dependent columns get one line per N.
    """
    for c in columns:
        if c not in RATE_COLUMNS and c != "p_opt":
            raise ValueError(f"unknown column {c!r}")
    ns = sorted({r.n_modes for r in records})
    series = []
    for c in columns:
        if len(ns) == 1 or c in SHARED_COLUMNS:
            base = [r for r in records if r.n_modes == ns[0]]
            series.append((c, [r.energy for r in base], [getattr(r, c) for r in base]))
        else:
            for n in ns:
                sub = [r for r in records if r.n_modes == n]
                series.append((f"{c} N={n}", [r.energy for r in sub], [getattr(r, c) for r in sub]))
    return series
