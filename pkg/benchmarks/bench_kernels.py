"""Time the numba and numpy backends of the hot kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--modes 128] [--points 65536] [--cells 1024]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from striph import _kernels


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=128)
    ap.add_argument("--points", type=int, default=65536)
    ap.add_argument("--cells", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = np.arange(1, args.modes + 1)
    ac = rng.standard_normal(args.modes) / n**2
    as_ = rng.standard_normal(args.modes) / n**2
    x = rng.uniform(0.0, 2 * np.pi, args.points)
    y = rng.uniform(0.0, 4.0, args.points)
    cn = rng.uniform(0.5, 2.0, args.cells)
    cs = rng.uniform(0.5, 2.0, args.cells)
    h = 2 * np.pi / args.cells

    cases = {
        f"series_fields N={args.modes} pts={args.points}": lambda b: _kernels.series_fields(
            0.1, ac, as_, 1.0, x, y, 2, backend=b
        ),
        f"scan_ap cells={args.cells}": lambda b: _kernels.scan_ap(cn, cs, h, 2.0, backend=b),
        f"scan_rh cells={args.cells}": lambda b: _kernels.scan_rh(cn, cs, h, 0.5, backend=b),
    }
    backends = ["numpy"] + (["numba"] if _kernels.HAS_NUMBA else [])
    print(f"{'kernel':<40} " + " ".join(f"{b:>10}" for b in backends) + "   speedup  max|diff|")
    for label, fn in cases.items():
        for b in backends:
            fn(b)  # warm-up / JIT compile
        t = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        if len(backends) == 2:
            diff = float(np.max(np.abs(np.asarray(fn("numba")) - np.asarray(fn("numpy")))))
            tail = f"{t['numpy'] / t['numba']:9.1f}x  {diff:.1e}"
        else:
            tail = "   (numba unavailable)"
        print(f"{label:<40} " + " ".join(f"{t[b] * 1e3:8.2f}ms" for b in backends) + "  " + tail)


if __name__ == "__main__":
    main()
