"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 32 64 128] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from balcover import exactfield as ef


def bench(name, fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--prime", type=int, default=ef.DEFAULT_PRIME)
    args = ap.parse_args()
    backends = ["python"] + (["compiled"] if ef.compiled_available() else [])
    rng = np.random.default_rng(0)
    print(f"{'op':<8}{'n':>6}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        A = rng.integers(0, args.prime, (n, n), dtype=np.int64)
        B = rng.integers(0, args.prime, (n, n), dtype=np.int64)
        for op, fn in [("rref", lambda: ef.rref(A, args.prime)),
                       ("matmul", lambda: ef.matmul(A, B, args.prime)),
                       ("rank", lambda: ef.rank(A, args.prime))]:
            times = []
            results = []
            for b in backends:
                ef.use_backend(b)
                results.append(fn())
                times.append(bench(op, fn, args.repeat))
            if len(results) == 2:
                r0, r1 = results
                same = (np.array_equal(r0[0], r1[0]) and r0[1] == r1[1]) if isinstance(r0, tuple) else np.array_equal(np.asarray(r0), np.asarray(r1))
                assert same, f"backends disagree on {op} n={n}"
            speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else f"{'-':>10}"
            print(f"{op:<8}{n:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
