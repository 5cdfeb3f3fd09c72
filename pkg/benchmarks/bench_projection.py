"""Benchmark the compiled projection kernel against the numpy fallback.

Run after an editable install:

    python benchmarks/bench_projection.py

Also cross-checks that both engines agree on every timed instance.
"""

import time

import numpy as np

from oco_lab import _kernels_py

try:
    from oco_lab import _kernels
except ImportError:
    _kernels = None


def make_instances(d, n, seed=0):
    gen = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        z = np.abs(gen.standard_normal(d)) * 2.0
        p = 1.8 + 8.0 * gen.random()
        r = 2.0 + 8.0 * gen.random()
        if (z**p).sum() <= 1.0:
            z *= 2.0
        out.append((z, p, r))
    return out


def bench(engine, instances, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for z, p, r in instances:
            engine.project_kkt(z, p, r, 1e-10, 200)
        best = min(best, time.perf_counter() - t0)
    return best / len(instances)


def main():
    print(f"{'d':>8} {'runs':>6} {'python':>12} {'compiled':>12} {'speedup':>9} {'agree':>10}")
    for d, n in ((4, 200), (32, 100), (256, 30), (4096, 5)):
        instances = make_instances(d, n, seed=d)
        t_py = bench(_kernels_py, instances)
        if _kernels is None:
            print(f"{d:>8} {n:>6} {t_py * 1e3:>10.3f}ms {'-':>12} {'-':>9} {'-':>10}")
            continue
        t_c = bench(_kernels, instances)
        worst = 0.0
        for z, p, r in instances:
            uc = _kernels.project_kkt(z, p, r, 1e-10, 200)[0]
            up = _kernels_py.project_kkt(z, p, r, 1e-10, 200)[0]
            worst = max(worst, float(np.abs(uc - up).max()))
        print(f"{d:>8} {n:>6} {t_py * 1e3:>10.3f}ms {t_c * 1e3:>10.3f}ms {t_py / t_c:>8.1f}x {worst:>10.2e}")


if __name__ == "__main__":
    main()
