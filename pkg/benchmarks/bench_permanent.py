"""Time the compiled permanent kernel against the NumPy fallback.

Both kernels share the inclusion-exclusion algorithm, so the ratio
isolates the interpreter overhead.  Results are wall-clock minima over
repeated calls on the same random matrices; agreement is checked to
1e-12 relative before any timing is reported.
"""

import argparse
from time import perf_counter

import numpy as np

from sis._ryser_py import permanent_kernel as py_kernel

try:
    from sis._ryser import permanent_kernel as c_kernel
except ImportError:
    c_kernel = None


def best_of(fn, m, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = perf_counter()
        fn(m)
        best = min(best, perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--min-n", type=int, default=2)
    parser.add_argument("--max-n", type=int, default=14)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if c_kernel is None:
        print("compiled kernel not built; timing the fallback only")
    rng = np.random.default_rng(args.seed)
    header = f"{'n':>3} {'python [us]':>14}"
    if c_kernel is not None:
        header += f" {'cython [us]':>14} {'speedup':>9}"
    print(header)
    for n in range(args.min_n, args.max_n + 1):
        m = np.ascontiguousarray(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        )
        t_py = best_of(py_kernel, m, args.repeats)
        line = f"{n:>3} {t_py * 1e6:>14.1f}"
        if c_kernel is not None:
            ref = py_kernel(m)
            val = c_kernel(m)
            if abs(val - ref) > 1e-12 * abs(ref):
                raise SystemExit(f"kernel mismatch at n={n}: {val} vs {ref}")
            t_c = best_of(c_kernel, m, args.repeats)
            line += f" {t_c * 1e6:>14.1f} {t_py / t_c:>9.1f}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
