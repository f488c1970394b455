"""Time the compiled kernels against the pure-numpy fallback.

Run from the repo root after an editable install:

    python benchmarks/bench_kernels.py

The compiled path pays off where Python overhead dominates (the damped
least-squares loop, many-column reductions); single large-array model
evaluation stays faster in vectorized numpy, which is why the fallback
is a first-class backend rather than a stopgap.
"""

import time

import numpy as np

from respstats._kernels import HAVE_EXT, pure

if HAVE_EXT:
    from respstats._kernels import _fast
else:
    _fast = None


def best_of(fn, repeat=5):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def row(name, pure_fn, fast_fn, repeat=5):
    t_pure = best_of(pure_fn, repeat)
    if fast_fn is None:
        print(f"{name:<28}{t_pure * 1e3:>10.2f} ms          (no extension built)")
        return
    t_fast = best_of(fast_fn, repeat)
    print(f"{name:<28}{t_pure * 1e3:>10.2f} ms{t_fast * 1e3:>10.2f} ms{t_pure / t_fast:>8.1f}x")


def main():
    rng = np.random.default_rng(0)

    big = rng.exponential(size=(4000, 2000))
    y = rng.standard_exponential(100_000)
    xs = np.linspace(20, 800, 40)
    true = np.array([120.0, 2.0, 0.8, 30.0, 1.5, 1.2])
    zs = pure.model_values(true, xs)
    u0s = [rng.uniform(np.log(0.1), np.log(10.0), 6) + np.log([300, 1, 1, 30, 1, 1]) for _ in range(20)]
    xq = np.linspace(0, 1000, 100_000)

    print(f"{'kernel':<28}{'pure':>13}{'cython':>12}{'speedup':>8}")
    row("column_kurtosis 4000x2000", lambda: pure.column_kurtosis(big),
        (lambda: _fast.column_kurtosis(big)) if _fast else None, repeat=3)
    row("gpd_nll n=1e5 x100",
        lambda: [pure.gpd_nll(y, 0.3, 0.1) for _ in range(100)],
        (lambda: [_fast.gpd_nll(y, 0.3, 0.1) for _ in range(100)]) if _fast else None)
    row("model_values n=1e5", lambda: pure.model_values(true, xq),
        (lambda: _fast.model_values(true, xq)) if _fast else None)
    row("lm_fit_log 40pts x20 starts",
        lambda: [pure.lm_fit_log(xs, zs, u0, 2000, 1e-10) for u0 in u0s],
        (lambda: [_fast.lm_fit_log(xs, zs, u0, 2000, 1e-10) for u0 in u0s]) if _fast else None,
        repeat=3)

    if _fast is not None:
        # agreement spot-check: same fit endpoint from the same start
        u_p, r_p, _, _ = pure.lm_fit_log(xs, zs, u0s[0], 2000, 1e-10)
        u_f, r_f, _, _ = _fast.lm_fit_log(xs, zs, u0s[0], 2000, 1e-10)
        print(f"\nlm agreement: |rmse_pure - rmse_cython| = {abs(r_p - r_f):.3e}")
        k_p, _ = pure.column_kurtosis(big)
        k_f, _ = _fast.column_kurtosis(big)
        print(f"kurtosis agreement: max |diff| = {np.nanmax(np.abs(k_p - k_f)):.3e}")


if __name__ == "__main__":
    main()
