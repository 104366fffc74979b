import numpy as np
import pytest

from pppm.sweep import COLUMNS, energy_grid, from_csv, plot_series, run_sweep, to_csv


def test_energy_grid():
    g = energy_grid(0.01, 1.0, 3)
    np.testing.assert_allclose(g, [0.01, 0.1, 1.0])
    np.testing.assert_allclose(energy_grid(0, 1, 5, "linear"), np.linspace(0, 1, 5))
    for bad in ((0.0, 1.0, 4, "log"), (1.0, 0.5, 4, "log"), (0.1, 1.0, 1, "log"), (0.1, 1, 4, "cubic")):
        with pytest.raises(ValueError):
            energy_grid(*bad)


def test_sweep_rows_and_round_trip():
    energies = energy_grid(0.02, 0.5, 6)
    recs = run_sweep([4, 8], energies)
    assert [(r.n_modes, r.energy) for r in recs] == [(n, float(e)) for n in (4, 8) for e in energies]
    for r in recs:
        assert r.r_pppm >= r.r_hadamard - 1e-12
        assert r.r_pppm < r.r_holevo
    text = to_csv(recs)
    assert text.splitlines()[0] == ",".join(COLUMNS)
    back = from_csv(text)
    for a, b in zip(recs, back):
        assert b.n_modes == a.n_modes
        np.testing.assert_allclose(
            [b.energy, b.p_opt, b.r_pppm], [a.energy, a.p_opt, a.r_pppm], rtol=1e-11
        )
    assert to_csv(back) == text


def test_parallel_sweep_matches_serial():
    energies = [0.05, 0.2]
    assert run_sweep([4], energies, workers=2) == run_sweep([4], energies)


def test_from_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        from_csv("a,b\n1,2\n")


def test_plot_series_labels():
    recs = run_sweep([4, 8], [0.1, 0.2])
    labels = [s[0] for s in plot_series(recs, ["r_dolinar", "r_pppm"])]
    assert labels == ["r_dolinar", "r_pppm N=4", "r_pppm N=8"]
    with pytest.raises(ValueError):
        plot_series(recs, ["nope"])
