"""Timing comparison of the jitted hot kernels against the numpy fallback.

Runs itself twice: once as-is (numba) and once with PROPLAB_NO_NUMBA=1.
Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeats R]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def bench_once(points, repeats):
    from proplab._kernels import (NUMBA_ENABLED, chirp_kernel,
                                  eval_fourier_modes)
    from proplab.rng import SplitMix64

    rng = SplitMix64(42)
    x = np.linspace(-8.0, 8.0, points)[:, None]
    m = np.array([[1.3]])
    mxy = np.array([[0.7]])
    k = 64
    freqs = (np.arange(k) - k // 2)[:, None] / 16.0
    coeffs = rng.normals(k) + 1j * rng.normals(k)

    chirp_kernel(x[:8], x[:8], m, mxy, m)            # trigger compilation
    eval_fourier_modes(coeffs, freqs, x[:8])

    t0 = time.perf_counter()
    for _ in range(repeats):
        chirp_kernel(x, x, m, mxy, m)
    t_chirp = (time.perf_counter() - t0) / repeats

    t0 = time.perf_counter()
    for _ in range(repeats):
        eval_fourier_modes(coeffs, freqs, x)
    t_modes = (time.perf_counter() - t0) / repeats

    label = "numba" if NUMBA_ENABLED else "numpy"
    print(f"{label:6s}  chirp_kernel({points}x{points}): {t_chirp * 1e3:8.2f} ms"
          f"   eval_fourier_modes({points}x{k}): {t_modes * 1e3:8.2f} ms")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--points", type=int, default=1024)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--single", action="store_true",
                        help="run only the current mode (internal)")
    args = parser.parse_args()

    if args.single:
        bench_once(args.points, args.repeats)
        return

    for no_numba in ("0", "1"):
        env = dict(os.environ, PROPLAB_NO_NUMBA=no_numba)
        subprocess.run([sys.executable, __file__, "--single",
                        "--points", str(args.points),
                        "--repeats", str(args.repeats)],
                       env=env, check=True)


if __name__ == "__main__":
    main()
