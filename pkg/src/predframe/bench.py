"""Benchmark the compiled kernels against the pure-Python fallback.

Run with ``python -m predframe.bench``.  Times the recursions that dominate
the Monte Carlo workloads at representative sizes and prints the speedup of
the compiled lane over the fallback.
"""

from __future__ import annotations

import timeit

import numpy as np

from . import _kernels_py

try:
    from . import _kernels
except ImportError:  # pragma: no cover - depends on the build environment
    _kernels = None


def _time(fn, number: int) -> float:
    return min(timeit.repeat(fn, number=number, repeat=3)) / number


def run(T: int = 4000, n_sim: int = 1_000_000) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(0)
    x = rng.standard_normal(T)
    eps = rng.standard_normal(n_sim)
    cases = [
        (f"garch_nll (T={T})", lambda m: (lambda: m.garch_nll(x, 0.1, 0.1, 0.8, 1.0)), 50),
        (f"tgarch_nll (T={T})", lambda m: (lambda: m.tgarch_nll(x, 0.1, 0.05, 0.1, 0.8, 1.0)), 50),
        (
            f"garch_filter_grad (T={T})",
            lambda m: (lambda: m.garch_filter_grad(x, 0.1, 0.1, 0.8, 1.0)),
            50,
        ),
        (
            f"arma_gls_quadforms (T={T})",
            lambda m: (lambda: m.arma_gls_quadforms(x, 0.4, 0.5)),
            20,
        ),
        (
            f"garch_simulate (n={n_sim})",
            lambda m: (lambda: m.garch_simulate(eps, 0.1, 0.1, 0.8, 0.5)),
            3,
        ),
    ]
    rows = []
    for name, make, number in cases:
        t_py = _time(make(_kernels_py), number)
        t_c = _time(make(_kernels), number) if _kernels is not None else float("nan")
        rows.append((name, t_py, t_c))
    return rows


def main() -> None:
    if _kernels is None:
        print("compiled kernels unavailable; timing the Python fallback only")
    rows = run()
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>12}  {'compiled':>12}  {'speedup':>8}")
    for name, t_py, t_c in rows:
        speed = t_py / t_c if t_c == t_c else float("nan")
        print(f"{name:<{width}}  {t_py * 1e3:>10.3f}ms  {t_c * 1e3:>10.3f}ms  {speed:>7.1f}x")


if __name__ == "__main__":
    main()
