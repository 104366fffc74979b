"""Time the compiled and numpy trial decoders on identical inputs.

    python benchmarks/bench_kernels.py [--trials 200000] [--n 4 8 16]
"""
import argparse
import time

import numpy as np

from pppm.codebook import enumerate_messages, message_to_transmit_state
from pppm.linear_optics import hadamard_butterfly
from pppm.simulator import kernels, trial_uniforms


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--energy", type=float, default=0.1)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if kernels.compiled_decode_block is None:
        raise SystemExit("compiled kernel not built; run pip install -e . --no-build-isolation")

    print(f"{'N':>4} {'message':>14} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}")
    for n in args.n:
        msgs = enumerate_messages(n)
        # one single-pulse and one two-pulse message
        for k in (0, 2 * n):
            msg = msgs[k]
            amps = np.ascontiguousarray(hadamard_butterfly(message_to_transmit_state(msg, args.energy, n)).amps.real)
            u = trial_uniforms(0, k, 0, args.trials, n)
            outs = {}

            def call(name, fn):
                out = np.empty(args.trials, dtype=np.int64)
                outs[name] = out
                return lambda: fn(amps, msg.n_pulses == 2, True, args.steps, u, out)

            t_py = best_of(call("python", kernels.python_decode_block), args.repeat)
            t_cy = best_of(call("cython", kernels.compiled_decode_block), args.repeat)
            if not np.array_equal(outs["python"], outs["cython"]):
                raise SystemExit(f"backends disagree for N={n}, message {msg.label()}")
            print(f"{n:>4} {msg.label():>14} {t_py:>11.4f} {t_cy:>11.4f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
