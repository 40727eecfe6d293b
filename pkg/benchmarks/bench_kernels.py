#!/usr/bin/env python3
"""Compare the compiled fuzzy-layer kernels against the numpy fallback.

Times forward + backward of the conjunction/disjunction kernels at the
shapes that dominate training, and a full policy gradient step.

Run: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from dnlrl.kernels import numpy_backend

try:
    from dnlrl.kernels import _fastcore
except ImportError:
    _fastcore = None


def time_callable(fn, repeats=2000):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_backend(backend, batch, n_in, n_out, rng):
    x = rng.uniform(0, 1, (batch, n_in))
    m = rng.uniform(0, 1, (n_out, n_in))
    md = rng.uniform(0, 1, n_out)
    out_c = backend.conj_forward(x, m)
    g_c = np.ones_like(out_c)
    out_d = backend.disj_forward(out_c, md)
    g_d = np.ones_like(out_d)

    def step():
        c = backend.conj_forward(x, m)
        d = backend.disj_forward(c, md)
        backend.disj_backward(c, md, d, g_d)
        backend.conj_backward(x, m, c, g_c)

    return time_callable(step)


def main():
    rng = np.random.default_rng(0)
    shapes = [(1, 32, 4), (64, 32, 4), (64, 46, 4), (256, 32, 8)]
    print(f"{'batch':>6} {'n_in':>5} {'n_out':>6} {'numpy':>12} {'cython':>12} {'speedup':>8}")
    for batch, n_in, n_out in shapes:
        t_np = bench_backend(numpy_backend, batch, n_in, n_out, rng)
        if _fastcore is None:
            print(f"{batch:>6} {n_in:>5} {n_out:>6} {t_np * 1e6:>10.1f}us "
                  f"{'n/a':>12} {'n/a':>8}")
            continue
        t_cy = bench_backend(_fastcore, batch, n_in, n_out, rng)
        print(f"{batch:>6} {n_in:>5} {n_out:>6} {t_np * 1e6:>10.1f}us "
              f"{t_cy * 1e6:>10.1f}us {t_np / t_cy:>7.1f}x")

    if _fastcore is None:
        print("\ncompiled kernels unavailable; install with Cython to compare")


if __name__ == "__main__":
    main()
