#!/usr/bin/env python3
"""Benchmark the compiled trial kernel against the pure-numpy fallback.

Times run_chain on identical random batches across block sizes, then the
end-to-end batch path (random draws included) for context. Run after
building the extension in place:

    python3 setup.py build_ext --inplace
    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from fdtr._kernels import fallback
from fdtr.channel import crandn
from fdtr.harness import simulate_batch
from fdtr.txchain import build_spreading_matrix

try:
    from fdtr._kernels import _core
except ImportError:
    _core = None


def batch_inputs(trials, n_symbols, bor, seed=0):
    rng = np.random.default_rng(seed)
    q = n_symbols * bor
    return (
        crandn(rng, trials, q),
        crandn(rng, trials, q),
        crandn(rng, trials, q - n_symbols),
        crandn(rng, trials, q),
        crandn(rng, trials, q),
    )


def time_call(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    cases = [
        (10_000, 16, 4),
        (10_000, 64, 4),
        (2_000, 64, 8),
        (1_000, 64, 16),
    ]
    print(f"{'trials':>7} {'N':>4} {'U':>3} {'fallback':>10} {'compiled':>10} {'speedup':>8}")
    for trials, n_symbols, bor in cases:
        spreading = build_spreading_matrix(n_symbols, bor, sign_seed=1)
        args = batch_inputs(trials, n_symbols, bor)
        t_fb = time_call(fallback.run_chain, *args, spreading.signs, bor)
        if _core is not None:
            t_c = time_call(_core.run_chain, *args, spreading.signs, bor)
            ratio = f"{t_fb / t_c:7.1f}x"
            t_c_str = f"{t_c * 1e3:8.1f}ms"
        else:
            ratio, t_c_str = "      -", "   (absent)"
        print(f"{trials:>7} {n_symbols:>4} {bor:>3} {t_fb * 1e3:8.1f}ms {t_c_str} {ratio}")

    start = time.perf_counter()
    simulate_batch(64, 4, 10_000, rng_seed=3)
    total = time.perf_counter() - start
    print(f"\nend-to-end simulate_batch(64, 4, 10000): {total:.2f}s (draws dominate)")
    if _core is None:
        print("compiled kernel not built; fallback timings only")


if __name__ == "__main__":
    main()
