"""Compare the compiled kernels against the pure-numpy fallback.

Times the mixture log-density and the fused quantized-entropy kernel on
the binary (1001-point) and 3-class (1326-point) lattices with M = 2
mixture components, and checks both backends agree to 1e-12.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from elm_lab.entropy import build_simplex_grid
from elm_lab.kernels import _fallback

try:
    from elm_lab.kernels import _core
except ImportError:
    _core = None


def _time(fn, *args, repeats: int = 200) -> float:
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def main() -> None:
    rng = np.random.default_rng(0)
    backends = [("python", _fallback)] + ([("cython", _core)] if _core else [])
    if _core is None:
        print("compiled extension not built; benchmarking the fallback only")
    for k, m in ((2, 1000), (3, 50)):
        grid = build_simplex_grid(k, m)
        weights = np.array([0.6, 0.4])
        alphas = rng.uniform(0.5, 50.0, size=(2, k))
        log_theta = np.ascontiguousarray(grid.log_points)
        ref = _fallback.quantized_entropy_bits(log_theta, weights, alphas)
        print(f"\nK={k} grid ({grid.n_points} points), M=2:")
        for name, impl in backends:
            got = impl.quantized_entropy_bits(log_theta, weights, alphas)
            assert abs(got - ref) < 1e-12, f"{name} disagrees: {got} vs {ref}"
            t_pdf = _time(impl.mixture_log_pdf, log_theta, weights, alphas)
            t_ent = _time(impl.quantized_entropy_bits, log_theta, weights, alphas)
            print(f"  {name:7s} mixture_log_pdf {t_pdf * 1e6:8.1f} us   "
                  f"quantized_entropy {t_ent * 1e6:8.1f} us")


if __name__ == "__main__":
    main()
