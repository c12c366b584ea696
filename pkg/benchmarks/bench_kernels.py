"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--points 4096] [--repeat 50]

Also times one Crank-Nicolson propagation with each backend selected
through DIRAC_LR_NUMBA, which is what a user actually sees.
"""
import argparse
import os
import time
import timeit

import numpy as np

from dirac_lr import _kernels


def best_of(fn, repeat):
    fn()  # warm-up (triggers JIT compilation)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(points, repeat):
    rng = np.random.default_rng(0)
    xi = np.linspace(-12, 12, points)
    u, l, pu, pl = (rng.normal(size=points) + 1j * rng.normal(size=points) for _ in range(4))
    v = rng.normal(size=points)
    cases = {
        "hermite_functions(n_max=40)": (
            lambda: _kernels._hermite_functions_nb(40, 1.0, xi),
            lambda: _kernels.hermite_functions_numpy(40, 1.0, xi)),
        "central4": (
            lambda: _kernels._central4_nb(u, 0.01),
            lambda: _kernels.central4_numpy(u, 0.01)),
        "dirac_combine": (
            lambda: _kernels._dirac_combine_nb(u, l, pu, pl, 0.3, 0.1, 1.0, v),
            lambda: _kernels.dirac_combine_numpy(u, l, pu, pl, 0.3, 0.1, 1.0, v)),
        "spinor_inner": (
            lambda: _kernels._spinor_inner_nb(u, l, pu, pl, 0.01),
            lambda: _kernels.spinor_inner_numpy(u, l, pu, pl, 0.01)),
    }
    print(f"{'kernel':32s} {'numba [us]':>12s} {'numpy [us]':>12s} {'speedup':>8s}")
    for name, (nb, npy) in cases.items():
        t_nb, t_np = best_of(nb, repeat), best_of(npy, repeat)
        print(f"{name:32s} {t_nb * 1e6:12.1f} {t_np * 1e6:12.1f} {t_np / t_nb:8.2f}")


def propagation_time(flag, steps):
    os.environ["DIRAC_LR_NUMBA"] = flag
    from dirac_lr.propagator import propagate
    from dirac_lr.scenario import load_scenario
    from dirac_lr.spectrum import eigen_solution, grid_for
    import importlib.resources
    ref = importlib.resources.files("dirac_lr") / "scenarios" / "alpha1_zero.scn"
    with importlib.resources.as_file(ref) as path:
        p = load_scenario(path)
    eig = eigen_solution(p, 1, 1, "+")
    grid = grid_for(p, 4, 1024)
    init = eig.field(p, p.t_min, grid)
    propagate(p, init, p.t_min, p.t_min + 0.01, 10, track_invariant=False)
    start = time.perf_counter()
    propagate(p, init, p.t_min, p.t_max, steps, track_invariant=False)
    return time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--steps", type=int, default=500)
    args = ap.parse_args()
    print(f"grid points: {args.points}, best of {args.repeat}")
    kernel_table(args.points, args.repeat)
    print()
    for flag, label in (("1", "numba"), ("0", "numpy")):
        print(f"propagate {args.steps} CN steps, 1024 points, {label}: "
              f"{propagation_time(flag, args.steps):.3f} s")


if __name__ == "__main__":
    main()
