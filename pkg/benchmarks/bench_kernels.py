"""Compare the compiled and numpy fringe-fit kernels.

Usage: python benchmarks/bench_kernels.py [--points 512] [--repeat 5]

Times the normal-equation kernel on its own and a full single-shot fit with
each backend swapped in, and checks the two backends agree.
"""

import argparse
import math
import timeit

import numpy as np

from clockinterf import NoiseParams, WavePacketParams, fit_fringe, pattern_entangled, simulate_shots
from clockinterf import kernels
from clockinterf.interferometer import default_grid


def use_backend(name: str) -> None:
    impl = kernels.get_backend(name)
    kernels.fringe_model = impl.fringe_model
    kernels.fringe_cost = impl.fringe_cost
    kernels.fringe_normal_equations = impl.fringe_normal_equations


def best_of(stmt, number: int, repeat: int) -> float:
    return min(timeit.repeat(stmt, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=512, help="grid points per profile")
    parser.add_argument("--repeat", type=int, default=5, help="timing repeats (best is kept)")
    parser.add_argument("--shots", type=int, default=20, help="noisy shots fitted per backend")
    args = parser.parse_args(argv)

    if not kernels.compiled_available():
        raise SystemExit("compiled extension not built; run `pip install -e .` first")

    p = WavePacketParams()
    grid = default_grid(p, points=args.points)
    shots = simulate_shots(pattern_entangled(grid, math.pi / 2, 0.0, 1.0, p), args.shots,
                           NoiseParams(1e4, 0.1, 1.0), seed=0).shots
    u = np.linspace(-4.0, 4.0, args.points)
    y = kernels.get_backend("python").fringe_model(u, [1.0, 0.1, 1.2, 0.7, 9.0, 0.3, 0.01])
    params = np.array([0.9, 0.0, 1.0, 0.6, 8.5, 0.0, 0.0])

    results = {}
    for name in ("python", "cython"):
        impl = kernels.get_backend(name)
        kernel = best_of(lambda: impl.fringe_normal_equations(u, y, params), 2000, args.repeat)
        use_backend(name)
        fits = [fit_fringe(s) for s in shots]
        fit_time = best_of(lambda: [fit_fringe(s) for s in shots], 1, args.repeat) / len(shots)
        results[name] = (kernel, fit_time, np.array([f.visibility for f in fits]))
    use_backend(kernels.BACKEND)

    py, cy = results["python"], results["cython"]
    print(f"points per profile: {args.points}")
    print(f"{'':24s}{'python':>12s}{'cython':>12s}{'speed-up':>10s}")
    print(f"{'normal equations (us)':24s}{py[0] * 1e6:12.1f}{cy[0] * 1e6:12.1f}"
          f"{py[0] / cy[0]:9.1f}x")
    print(f"{'full fit (ms)':24s}{py[1] * 1e3:12.2f}{cy[1] * 1e3:12.2f}{py[1] / cy[1]:9.1f}x")
    print(f"max |V_python - V_cython| over {args.shots} shots: {np.max(np.abs(py[2] - cy[2])):.2e}")


if __name__ == "__main__":
    main()
