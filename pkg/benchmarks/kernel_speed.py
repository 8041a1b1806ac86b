"""Timing comparison of the compiled kernels against the pure-numpy
fallback (selected with SDEDISC_NO_NUMBA=1).

Run without arguments: times the current process's backend, then
re-executes itself once with the other backend and prints both.
"""

import os
import subprocess
import sys
import time

import numpy as np


def workload(n: int = 12, reps: int = 50, seed: int = 0) -> dict:
    from sdedisc.linalg import real_schur, solve_lyapunov, mat_exp
    from sdedisc.modelgen import EnsembleSpec, gen_random_system
    from sdedisc.discretize import discretize_proposed

    rng = np.random.default_rng(seed)
    mats = [rng.standard_normal((n, n)) for _ in range(reps)]
    stable = [m - (np.abs(np.linalg.eigvals(m).real).max() + 0.5) * np.eye(n)
              for m in mats]
    spds = [g @ g.T for g in mats]
    models = [gen_random_system(EnsembleSpec(6, 4, 2, seed=1), stream=i)
              for i in range(reps)]

    # warm-up triggers jit compilation so it is not timed below
    real_schur(mats[0])
    solve_lyapunov(stable[0], spds[0])
    discretize_proposed(models[0], 1.0)

    out = {}
    t0 = time.perf_counter()
    for m in mats:
        real_schur(m)
    out["real_schur"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    for a, c in zip(stable, spds):
        solve_lyapunov(a, c)
    out["solve_lyapunov"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    for m in mats:
        mat_exp(m, 1.0)
    out["mat_exp"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    for m in models:
        discretize_proposed(m, 1.0)
    out["discretize_proposed"] = time.perf_counter() - t0
    return out


def main() -> None:
    from sdedisc._backend import USE_NUMBA

    label = "numba" if USE_NUMBA else "pure-numpy"
    results = workload()
    for name, seconds in results.items():
        print(f"{label:11s} {name:20s} {seconds * 1e3:9.2f} ms", flush=True)

    if len(sys.argv) > 1 and sys.argv[1] == "--single":
        return
    env = dict(os.environ)
    if USE_NUMBA:
        env["SDEDISC_NO_NUMBA"] = "1"
    else:
        env.pop("SDEDISC_NO_NUMBA", None)
    subprocess.run([sys.executable, __file__, "--single"],
                   env=env, check=True)


if __name__ == "__main__":
    main()
