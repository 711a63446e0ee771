"""Compare the numba kernels against the pure-numpy fallback.

Run directly:  python3 benchmarks/bench_kernels.py [grid_n]

The same functions are selected at import time by DTQSW_DISABLE_NUMBA;
here both variants are timed side by side on the genfun hot spots.
"""

import sys
import time

import numpy as np

from dtqsw import _kernels
from dtqsw.genfun import _subst_grid
from dtqsw.model import Model, WalkParams, kraus_family, momentum_kernel


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    grid_n = int(sys.argv[1]) if len(sys.argv) > 1 else 1024
    z, p, theta = 0.999, 0.5, 0.6
    x, _ = _subst_grid(grid_n)

    print(f"grid_n={grid_n}, numba available: {_kernels.USING_NUMBA}")

    t_np, d_np = timeit(_kernels.determinant_grid_numpy, x, x, z, p, theta)
    print(f"determinant grid  numpy: {t_np * 1e3:9.2f} ms")
    if _kernels.USING_NUMBA:
        _kernels.determinant_grid(x[:4], x[:4], z, p, theta)  # compile
        t_nb, d_nb = timeit(_kernels.determinant_grid, x, x, z, p, theta)
        print(f"determinant grid  numba: {t_nb * 1e3:9.2f} ms "
              f"(x{t_np / t_nb:.1f}, max diff {np.max(np.abs(d_np - d_nb)):.2e})")

    fam = kraus_family(WalkParams(theta, p, Model.CORRELATED))
    k = x[:256]
    v = momentum_kernel(fam, k[:, None], k[None, :]).reshape(-1, 4, 4)
    mats = np.eye(4) - z * v
    t_np, a_np = timeit(_kernels.invert_grid_4x4_numpy, mats)
    print(f"4x4 inverse batch numpy: {t_np * 1e3:9.2f} ms  ({len(mats)} matrices)")
    if _kernels.USING_NUMBA:
        _kernels.invert_grid_4x4(mats[:4])  # compile
        t_nb, a_nb = timeit(_kernels.invert_grid_4x4, mats)
        print(f"4x4 inverse batch numba: {t_nb * 1e3:9.2f} ms "
              f"(x{t_np / t_nb:.1f}, max diff {np.max(np.abs(a_np - a_nb)):.2e})")


if __name__ == "__main__":
    main()
