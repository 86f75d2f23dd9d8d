"""Compare the numba and numpy kernel paths, with FFT cost for context.

Run as a script:  python3 benchmarks/bench_kernels.py [N ...]

The right-hand-side evaluation is FFT-dominated; this benchmark puts a
number on that by timing the pointwise cubic assembly (both backends),
the RK4 combine, and a single complex FFT of the same length.
"""

import sys
import time

import numpy as np

from besovlab.kernels import (
    USE_NUMBA,
    _nl_forq_v_np,
    _rk4_combine_np,
    nl_forq_v,
    rk4_combine,
)


def best_of(fn, repeats=7):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(n):
    rng = np.random.default_rng(0)
    u, v, vx = (rng.normal(size=n) for _ in range(3))
    y, k1, k2, k3, k4 = (
        rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(5)
    )
    # warm-up (includes numba compilation on the first call)
    nl_forq_v(u, v, vx)
    rk4_combine(y, k1, k2, k3, k4, 1e-3)

    rows = [
        ("cubic assembly (active)", best_of(lambda: nl_forq_v(u, v, vx))),
        ("cubic assembly (numpy)", best_of(lambda: _nl_forq_v_np(u, v, vx))),
        ("rk4 combine (active)", best_of(lambda: rk4_combine(y, k1, k2, k3, k4, 1e-3))),
        ("rk4 combine (numpy)", best_of(lambda: _rk4_combine_np(y, k1, k2, k3, k4, 1e-3))),
        ("complex fft", best_of(lambda: np.fft.fft(y))),
    ]
    print(f"\nN = {n}  (active backend: {'numba' if USE_NUMBA else 'numpy'})")
    for name, t in rows:
        print(f"  {name:<26} {t * 1e6:10.1f} us")


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [2**14, 2**17, 2**18]
    for n in sizes:
        bench(n)
