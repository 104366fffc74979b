"""Command-line front end.

Subcommands: sweep, optimize-p, simulate, plot, figures, codebook.
Options can also come from a ``--config`` file of ``key = value`` lines
(keys are option names, e.g. ``points = 40`` or ``n = 4 8``); flags given on
the command line win over the file, the file wins over built-in defaults.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 failed
simulation check.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .codebook import Codebook
from .detectors import QuadratureError
from .rates import build_conditional_table, r_hadamard, r_pppm_closed, r_pppm_opt
from .svg import fmt, read_svg_series, render
from .sweep import RATE_COLUMNS, energy_grid, from_csv, plot_series, run_sweep, to_csv

EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 2, 3, 4

FIGURES = {
    "1": dict(
        n=[4, 16, 64, 256, 1024], emin=1e-3, emax=1.0,
        columns=["r_holevo", "r_dolinar", "r_hadamard"],
        title="Holevo, Dolinar and Hadamard rates",
    ),
    "2": dict(
        n=[4, 8, 16, 32], emin=1e-3, emax=1.0,
        columns=["r_hadamard", "r_pppm"],
        title="PPPM vs Hadamard",
    ),
    "3": dict(
        n=[4, 8, 16, 32], emin=0.02, emax=0.5,
        columns=["r_dolinar", "r_hadamard", "r_pppm"],
        title="PPPM, Hadamard and Dolinar around E = 0.1",
    ),
}


class NumericalFailure(Exception):
    pass


class ValidationFailure(Exception):
    pass


def _write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _manifest(path, command: str, params: dict, outputs: list[str], **extra) -> None:
    data = {"command": command, "parameters": params, "version": __version__, "outputs": outputs}
    data.update(extra)
    _write(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


# --------------------------------------------------------------------------
# commands


def cmd_sweep(args) -> int:
    energies = energy_grid(args.emin, args.emax, args.points, args.scale)
    try:
        records = run_sweep(args.n, energies, workers=args.workers)
    except QuadratureError as exc:
        raise NumericalFailure(str(exc)) from None
    out = Path(args.out)
    _write(out, to_csv(records))
    outputs = [str(out)]
    if args.svg:
        _write(args.svg, render(plot_series(records, args.columns), logx=args.scale == "log", title=args.title))
        outputs.append(args.svg)
    _manifest(out.with_suffix(".manifest.json"), "sweep", _params(args), outputs)
    print(f"wrote {len(records)} rows to {out}")
    return 0


def cmd_optimize_p(args) -> int:
    try:
        ps = np.linspace(0.0, 1.0, int(round(1.0 / args.step)) + 1)
        rates = r_pppm_closed(args.energy, args.n, ps)
        best = r_pppm_opt(args.energy, args.n)
        had = r_hadamard(args.energy, args.n)
    except QuadratureError as exc:
        raise NumericalFailure(str(exc)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "r_pppm"])
    for p, r in zip(ps, rates):
        w.writerow([fmt(p), fmt(r)])
    outputs = []
    if args.out:
        _write(args.out, buf.getvalue())
        outputs.append(args.out)
        _manifest(Path(args.out).with_suffix(".manifest.json"), "optimize-p", _params(args), outputs)
    print(f"E={fmt(args.energy)} N={args.n}")
    print(f"p_opt={fmt(best.p_opt)} r_pppm={fmt(best.rate_bits_per_mode)} r_hadamard={fmt(had)}")
    if best.mi_residual is not None:
        print(f"closed-form vs mutual information residual: {best.mi_residual:.3e}")
    return 0


def simulation_report(res, validation, reference: float | None) -> tuple[str, bool]:
    """Text report and overall verdict for one run."""
    cfg = res.config
    lines = [
        "PPPM receiver Monte Carlo",
        f"energy={fmt(cfg.energy)} n_modes={cfg.n_modes} p={fmt(cfg.p)} steps={cfg.steps} "
        f"trials={cfg.trials} seed={cfg.seed} mode={cfg.dolinar_mode} allocation={cfg.allocation}",
        f"max |z| over cells: {validation.max_sigma:.4f} (threshold {fmt(validation.threshold)})",
        f"structural-zero violations: {validation.structural_violations}",
        f"empirical I(X;Y) = {res.mi:.8f} +- {res.mi_sigma:.8f} bits",
    ]
    ok = validation.passed
    if reference is not None:
        dev = abs(res.mi - reference)
        mi_ok = dev <= 3.0 * res.mi_sigma or (res.mi_sigma == 0.0 and dev <= 1e-12)
        lines.append(f"closed-form N*R = {reference:.8f} bits, deviation {dev:.3e} ({'ok' if mi_ok else 'FAIL'} at 3 sigma)")
        ok = ok and mi_ok
    lines.append(f"table check: {'PASS' if validation.passed else 'FAIL'}")
    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", ok


def _comparison_csv(res, analytic, validation) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["message_id", "outcome_id", "count", "trials", "empirical", "analytic", "z"])
    counts = res.table.counts
    n = res.table.trials_per_message
    rows, cols = np.nonzero((counts > 0) | (analytic > 0))
    for a, b in zip(rows.tolist(), cols.tolist()):
        f = counts[a, b] / n[a] if n[a] else 0.0
        w.writerow([a, b, int(counts[a, b]), int(n[a]), fmt(f), fmt(analytic[a, b]), fmt(validation.z[a, b])])
    return buf.getvalue()


def cmd_simulate(args) -> int:
    from .simulator import SimConfig, compare_with_table, run_trials

    try:
        cfg = SimConfig(
            energy=args.energy, n_modes=args.n, p=args.p, steps=args.steps, trials=args.trials,
            seed=args.seed, dolinar_mode=args.mode, allocation=args.allocation,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        res = run_trials(cfg, workers=args.workers)
        solo = "coin" if cfg.dolinar_mode == "paper-model" else "dolinar"
        table = build_conditional_table(cfg.energy, cfg.n_modes, solo)
        reference = cfg.n_modes * r_pppm_closed(cfg.energy, cfg.n_modes, cfg.p) if solo == "coin" else None
    except QuadratureError as exc:
        raise NumericalFailure(str(exc)) from None
    validation = compare_with_table(res.table, table, args.threshold)
    report, ok = simulation_report(res, validation, reference)
    prefix = Path(args.out_prefix)
    outputs = []
    counts = io.StringIO()
    w = csv.writer(counts, lineterminator="\n")
    w.writerow(["message_id", "outcome_id", "count"])
    w.writerows(res.table.rows())
    for suffix, text in (
        ("_counts.csv", counts.getvalue()),
        ("_compare.csv", _comparison_csv(res, table.dense(), validation)),
        ("_report.txt", report),
    ):
        path = prefix.with_name(prefix.name + suffix)
        _write(path, text)
        outputs.append(str(path))
    _manifest(
        prefix.with_name(prefix.name + ".manifest.json"), "simulate", _params(args), outputs,
        config=cfg.to_dict(),
    )
    sys.stdout.write(report)
    if not ok:
        raise ValidationFailure("simulation disagrees with the analytic table")
    return 0


def cmd_plot(args) -> int:
    try:
        records = from_csv(Path(args.input).read_text(encoding="utf-8"))
        if not records:
            raise ValueError("no data rows")
        series = plot_series(records, args.columns)
    except (ValueError, OSError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    text = render(series, logx=args.logx, title=args.title)
    _write(args.output, text)
    outputs = [args.output]
    if args.points_out:
        _write(args.points_out, svg_points_csv(text))
        outputs.append(args.points_out)
    _manifest(Path(args.output).with_suffix(".manifest.json"), "plot", _params(args), outputs)
    return 0


def svg_points_csv(svg_text: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "y"])
    for label, (xs, ys) in read_svg_series(svg_text).items():
        for x, y in zip(xs, ys):
            w.writerow([label, fmt(x), fmt(y)])
    return buf.getvalue()


def cmd_figures(args) -> int:
    preset = FIGURES[args.fig]
    outdir = Path(args.outdir)
    energies = energy_grid(preset["emin"], preset["emax"], args.points, "log")
    try:
        records = run_sweep(preset["n"], energies, workers=args.workers)
    except QuadratureError as exc:
        raise NumericalFailure(str(exc)) from None
    csv_path = outdir / f"fig{args.fig}.csv"
    svg_path = outdir / f"fig{args.fig}.svg"
    _write(csv_path, to_csv(records))
    _write(svg_path, render(plot_series(records, preset["columns"]), logx=True, title=preset["title"]))
    params = _params(args)
    params["preset"] = preset
    _manifest(outdir / f"fig{args.fig}.manifest.json", "figures", params, [str(csv_path), str(svg_path)])
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def cmd_codebook(args) -> int:
    text = Codebook.build(args.n, args.energy).to_json() + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# --------------------------------------------------------------------------
# parsing


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _columns(text: str) -> list[str]:
    cols = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in cols if c not in RATE_COLUMNS and c != "p_opt"]
    if bad or not cols:
        raise argparse.ArgumentTypeError(f"unknown columns {bad}; choose from {', '.join(RATE_COLUMNS)}")
    return cols


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pppm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file with option defaults")
        return p

    p = common(sub.add_parser("sweep", help="rates over an energy grid"))
    p.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32], help="numbers of modes")
    p.add_argument("--emin", type=float, default=0.02)
    p.add_argument("--emax", type=float, default=0.5)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--scale", choices=("log", "linear"), default="log")
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--svg", default=None)
    p.add_argument("--columns", type=_columns, default=list(RATE_COLUMNS))
    p.add_argument("--title", default="")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("optimize-p", help="rate as a function of p and its maximum"))
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_optimize_p)

    p = common(sub.add_parser("simulate", help="Monte Carlo check of the channel table"))
    p.add_argument("--energy", type=float, default=0.1)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=10_000, help="VP taps T")
    p.add_argument("--trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("paper-model", "physical"), default="paper-model")
    p.add_argument("--allocation", choices=("prior", "exhaustive"), default="prior")
    p.add_argument("--threshold", type=float, default=5.0, help="per-cell sigma bound")
    p.add_argument("--out-prefix", default="simulation")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("plot", help="SVG chart from a sweep CSV"))
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--columns", type=_columns, default=["r_holevo", "r_dolinar", "r_hadamard", "r_pppm"])
    p.add_argument("--logx", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--title", default="")
    p.add_argument("--points-out", default=None, help="also dump the plotted points as CSV")
    p.set_defaults(func=cmd_plot)

    p = common(sub.add_parser("figures", help="preset sweeps for the three rate comparisons"))
    p.add_argument("--fig", choices=sorted(FIGURES), required=True)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--outdir", default="figures")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_figures)

    p = common(sub.add_parser("codebook", help="dump the message set as JSON"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--energy", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_codebook)
    return parser


def _config_tokens(path: str, parser: argparse.ArgumentParser) -> list[str]:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[pppm]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    tokens: list[str] = []
    for key, value in cp["pppm"].items():
        flag = "--" + key.replace("_", "-")
        low = value.strip().lower()
        if low in ("true", "yes", "on"):
            tokens.append(flag)
        elif low in ("false", "no", "off"):
            tokens.append("--no-" + key.replace("_", "-"))
        else:
            tokens += [flag, *shlex.split(value)]
    return tokens


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and not argv[0].startswith("-"):
        # file values go first so that explicit flags override them
        argv = [argv[0], *_config_tokens(known.config, parser), *argv[1:]]
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pppm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"pppm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"pppm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationFailure as exc:
        print(f"pppm: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
