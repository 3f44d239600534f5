"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--n 200]

Each row runs the same public call with ``kernels`` pointed at one backend
and reports the best wall time of ``--repeat`` runs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from specgraph import _backend, _pykernels, local, spectra
from specgraph.graph import d_regular, gnp, laplacian


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(n):
    g = d_regular(n, 3, 0)
    big = d_regular(20 * n, 3, 1)
    lap = laplacian(gnp(n // 2, 0.2, 2))
    x = np.random.default_rng(0).standard_normal(big.n)
    return [
        (f"jacobi eig_dense n={n // 2}", lambda: spectra.eig_dense(lap)),
        (f"push_ppr n={big.n} eps=1e-6", lambda: local.push_ppr(big, 0, 0.05, 1e-6)),
        (f"push_l1 n={big.n} tau=1e-6", lambda: local.push_l1(big, [0], 0.95, 1e-6)),
        (f"sweep_cut n={big.n}", lambda: spectra.sweep_cut(big, x)),
        (f"push_ppr n={g.n} eps=1e-7", lambda: local.push_ppr(g, 0, 0.1, 1e-7)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=200)
    args = ap.parse_args(argv)

    if _backend.compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    backends = [("cython", _backend.compiled_kernels), ("python", _pykernels)]
    print(f"{'case':36s} {'cython (s)':>12s} {'python (s)':>12s} {'speedup':>9s}")
    for name, fn in cases(args.n):
        times = {}
        for label, mod in backends:
            local.kernels = mod
            spectra.kernels = mod
            times[label] = best_time(fn, args.repeat)
        local.kernels = spectra.kernels = _backend.kernels
        print(f"{name:36s} {times['cython']:12.4f} {times['python']:12.4f} {times['python'] / times['cython']:8.1f}x")


if __name__ == "__main__":
    main()
