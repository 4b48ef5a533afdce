"""Compare the numba kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the product-grid potential, scattered-point evaluation and the basin
excess sum used by the Thomas-Fermi quadrature, plus one end-to-end
chemical-potential solve per backend.
"""

import argparse
import timeit

import numpy as np

from surftrap import _kernels
from surftrap.config import loads_config


def bench(fn, repeat):
    fn()  # warm-up / JIT
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=101, help="grid points per axis")
    args = ap.parse_args(argv)

    cfg = loads_config("").trap_configuration()
    p = cfg.params()
    xs = np.linspace(-60e-6, 60e-6, args.n)
    ys = np.linspace(-60e-6, 60e-6, args.n)
    zs = np.linspace(0.4e-6, 6e-6, args.n)
    rng = np.random.default_rng(0)
    pts = rng.uniform([-6e-5, -6e-5, 4e-7], [6e-5, 6e-5, 6e-6], (args.n ** 3, 3)).T
    grid = _kernels.potential_grid(xs, ys, zs, p)
    level = float(np.quantile(grid, 0.2))
    mask = grid < level

    cases = {
        f"potential_grid {args.n}^3": lambda nb: _kernels.potential_grid(xs, ys, zs, p, nb),
        f"potential_points {args.n ** 3}": lambda nb: _kernels.potential_points(*pts, p, nb),
        f"excess_sum {args.n}^3": lambda nb: _kernels.excess_sum(grid, mask, level, nb),
    }
    backends = [False] + ([True] if _kernels.HAS_NUMBA else [])
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases.items():
        t = [bench(lambda: fn(nb), args.repeat) * 1e3 for nb in backends]
        if len(t) == 2:
            print(f"{name:<28}{t[0]:>12.2f}{t[1]:>12.2f}{t[0] / t[1]:>10.1f}")
        else:
            print(f"{name:<28}{t[0]:>12.2f}{'n/a':>12}")

    from surftrap.condensate import tf_profile
    from surftrap.landscape import analyze_landscape
    rep = analyze_landscape(cfg)
    default = _kernels.USE_NUMBA
    t = []
    for nb in backends:
        _kernels.USE_NUMBA = nb
        t.append(bench(lambda: tf_profile(cfg, 1e5, rep), args.repeat) * 1e3)
    _kernels.USE_NUMBA = default
    name = "tf_profile (end to end)"
    if len(t) == 2:
        print(f"{name:<28}{t[0]:>12.2f}{t[1]:>12.2f}{t[0] / t[1]:>10.1f}")
    else:
        print(f"{name:<28}{t[0]:>12.2f}{'n/a':>12}")


if __name__ == "__main__":
    main()
