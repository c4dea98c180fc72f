"""Compare the compiled banded solvers with the numpy fallback.

Times the batched tridiagonal and pentadiagonal kernels at the shapes the
annulus solvers use (one system per Fourier mode, length n_s), plus an
end-to-end Dirichlet Poisson solve and Hodge decomposition with each backend
swapped in.  Results go to stdout and, with --out, to a CSV file.

    python3 benchmarks/bench_kernels.py --grids 64x128,128x256,256x512
"""

from __future__ import annotations

import argparse
import contextlib
import timeit

import numpy as np

from annulab import kernels
from annulab.convergence import parse_grid
from annulab.grid import OneForm, make_grid
from annulab.io import write_csv
from annulab.pde import hodge_decompose, poisson_dirichlet


def tridiagonal_system(rng, nb, n):
    lower = rng.uniform(-1.0, 0.0, (nb, n))
    upper = rng.uniform(-1.0, 0.0, (nb, n))
    diag = 2.5 + rng.uniform(0.0, 1.0, (nb, n))
    return lower, diag, upper, rng.standard_normal((nb, n))


def pentadiagonal_system(rng, nb, n):
    bands = rng.uniform(-0.5, 0.5, (nb, 5, n))
    bands[:, 2] = 4.0 + rng.uniform(0.0, 1.0, (nb, n))
    return np.ascontiguousarray(bands), rng.standard_normal((nb, n))


@contextlib.contextmanager
def using(module):
    saved = kernels.solve_tridiagonal, kernels.solve_pentadiagonal
    kernels.solve_tridiagonal = module.solve_tridiagonal
    kernels.solve_pentadiagonal = module.solve_pentadiagonal
    try:
        yield
    finally:
        kernels.solve_tridiagonal, kernels.solve_pentadiagonal = saved


def best_of(fn, repeat):
    t = timeit.Timer(fn)
    number, _ = t.autorange()
    return min(t.repeat(repeat=repeat, number=number)) / number


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grids", default="64x128,128x256,256x512")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional CSV path")
    args = p.parse_args(argv)

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(args.seed)
    rows = []
    for text in args.grids.split(","):
        n_s, n_t = parse_grid(text)
        grid = make_grid(1.0, 2.0, n_s, n_t)
        tri = tridiagonal_system(rng, n_t, n_s)
        penta = pentadiagonal_system(rng, n_t, n_s)
        rhs = np.sin(3 * grid.TH) * grid.R
        omega = OneForm.from_s_components(grid, np.cos(grid.TH) * grid.S, 1.0 + np.sin(2 * grid.TH))
        cases = {
            "tridiagonal": lambda m: m.solve_tridiagonal(*tri),
            "pentadiagonal": lambda m: m.solve_pentadiagonal(*penta),
            "poisson_dirichlet": lambda m: poisson_dirichlet(grid, rhs),
            "hodge_decompose": lambda m: hodge_decompose(omega, tolerance=np.inf),
        }
        for case, fn in cases.items():
            times = {}
            for name, mod in impls.items():
                with using(mod):
                    times[name] = best_of(lambda: fn(mod), args.repeat)
            speedup = times["numpy"] / times["cython"] if "cython" in times else float("nan")
            rows.append([text, case, times["numpy"], times.get("cython", float("nan")), speedup])
            print(f"{text:<9s} {case:<18s} numpy {times['numpy'] * 1e3:9.3f} ms   "
                  f"cython {times.get('cython', float('nan')) * 1e3:9.3f} ms   x{speedup:6.1f}")
    if args.out:
        write_csv(args.out, ["grid", "case", "numpy_s", "cython_s", "speedup"], rows)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
