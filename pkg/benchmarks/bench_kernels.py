"""Compare the compiled and pure-Python kernel backends.

Times the Jacobi eigenvalue solver, the dense simplex on the retrieval LP and
the inverse-CDF sampler, once per available backend, and prints the median
wall time with the speedup of the compiled kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]
"""

import argparse
import statistics
import time

import numpy as np

from phasepsr import comb, kernels
from phasepsr.rng import Xoshiro256


def _hermitian(d):
    gen = np.random.default_rng(d)
    a = gen.normal(size=(d, d)) + 1j * gen.normal(size=(d, d))
    return a + a.conj().T


def cases(quick):
    sizes = (8, 16) if quick else (16, 32, 64)
    lps = (5, 10) if quick else (20, 50)
    shots = 10_000 if quick else 100_000
    out = []
    for d in sizes:
        h = _hermitian(d)
        out.append((f"jacobi d={d}", lambda h=h: kernels.jacobi_eigvalsh(h)))
    for n in lps:
        out.append((f"simplex LP n={n}", lambda n=n: comb.solve_lp(n)))
    probs = np.full(4, 0.25)
    out.append((f"sample {shots} shots", lambda: Xoshiro256(1).sample_counts(probs, shots)))
    return out


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--quick", action="store_true", help="small sizes only")
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.current_backend()})")
    header = f"{'case':<22}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    if "cython" in backends:
        header += f"{'speedup':>10}"
    print(header)
    for name, fn in cases(args.quick):
        row = {}
        for b in backends:
            with kernels.backend(b):
                fn()  # warm-up
                row[b] = median_time(fn, args.repeat)
        line = f"{name:<22}" + "".join(f"{1e3 * row[b]:>16.3f}" for b in backends)
        if "cython" in row:
            line += f"{row['python'] / row['cython']:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
