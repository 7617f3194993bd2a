"""Jacobi eigensolver: numba kernel against the pure numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeat 3]

Matrices are random symmetric ones and the symmetrized discrete 0-form
Laplacian of a trace-free torus structure. LAPACK eigvalsh is the reference.
"""

import argparse
import time

import numpy as np

from codazzi import _kernels, hodge, samples


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def _cases(sizes, rng):
    for n in sizes:
        A = rng.standard_normal((n, n))
        yield f"random n={n}", 0.5 * (A + A.T)
    for N in (8, 12):
        cx = hodge.build_complex(samples.random_trace_free(1), N)
        yield f"Laplacian 0-forms N={N}", cx.symmetrized(0)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="32,64,128")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    sizes = [int(x) for x in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    if _kernels.jacobi_numba is not None:
        _kernels.jacobi_numba(np.eye(3))  # compile outside the timed region
    print(f"{'case':<26}{'numba s':>10}{'numpy s':>10}{'speedup':>9}{'max err':>10}")
    for name, S in _cases(sizes, rng):
        ref = np.linalg.eigvalsh(S)
        t_np, (w_np, _, _) = _time(lambda: _kernels.jacobi_numpy(S), args.repeat)
        err = np.abs(np.sort(w_np) - ref).max()
        if _kernels.jacobi_numba is not None:
            t_nb, (w_nb, _, _) = _time(lambda: _kernels.jacobi_numba(S), args.repeat)
            err = max(err, np.abs(np.sort(w_nb) - ref).max())
            print(f"{name:<26}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}{err:>10.1e}")
        else:
            print(f"{name:<26}{'-':>10}{t_np:>10.4f}{'-':>9}{err:>10.1e}")


if __name__ == "__main__":
    main()
