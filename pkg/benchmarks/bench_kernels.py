"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from cohmismatch import backend
from cohmismatch.circuits import NoiseSpec, random_circuit, simulate_density
from cohmismatch.rng import make_rng


def _secular_case(m: int, seed: int = 0):
    rng = make_rng(seed, m)
    F = float(rng.random())
    C = rng.random(m) * 0.3 + 1e-3
    D = np.sort(rng.random(m))[::-1] + np.arange(m)[::-1] * 1e-6
    return F, C, D


def _best(fn, repeat: int, number: int) -> float:
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    kernels = backend.available()
    if "cython" not in kernels:
        print("compiled extension not built; only the fallback is available")
    names = sorted(kernels)
    print(f"{'case':<34}" + "".join(f"{n:>14}" for n in names) + ("      speedup" if len(names) == 2 else ""))

    rows = []
    for m in (8, 64, 512):
        F, C, D = _secular_case(m)
        rows.append((f"secular roots, m={m}", {n: _best(lambda k=kernels[n]: k.secular_roots(F, C, D), args.repeat, 20) for n in names}))
    for n_q, nu, ch in ((2, 200, "depolarising"), (4, 200, "depolarising"), (6, 200, "depolarising"), (6, 200, "damping"), (8, 100, "dephasing")):
        spec = random_circuit(n_q, nu, seed=1, noise=NoiseSpec(ch, 0.5 / nu))
        rows.append((f"density sim N={n_q} nu={nu} {ch}", {n: _best(lambda k=kernels[n]: simulate_density(spec, k), args.repeat, 3) for n in names}))
    for label, t in rows:
        line = f"{label:<34}" + "".join(f"{t[n] * 1e3:>11.3f} ms" for n in names)
        if len(names) == 2:
            line += f"{t['python'] / t['cython']:>12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
