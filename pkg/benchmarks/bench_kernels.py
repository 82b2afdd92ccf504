"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from udesign import _backend
from udesign.optimize import random_unitaries
from udesign.symplectic import jacobi_design
from udesign.weyl import weyl_monomials_prime_frame


def cases(rng):
    U = random_unitaries(2, 12, rng)
    V = random_unitaries(4, 200, rng)
    traces = jacobi_design(3, 2, group="transitive").traces().ravel()
    perms, phases = weyl_monomials_prime_frame(3, 1, 2)
    M = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    return [
        ("pair_power_sum d=4 K=200 t=2", "pair_power_sum", (V.reshape(200, -1), 2)),
        ("power_sum |V|*|G| traces t=2", "power_sum", (traces, 2)),
        ("potential_and_gradient d=2 K=12 t=2", "potential_and_gradient", (U, 2)),
        ("potential_and_gradient d=4 K=200 t=3", "potential_and_gradient", (V, 3)),
        ("monomial_traces 81 ops d=9", "monomial_traces", (perms, phases, M)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    names = sorted(_backend.BACKENDS)
    print(f"{'kernel':40s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn, fargs in cases(rng):
        best = {}
        for n in names:
            f = getattr(_backend.BACKENDS[n], fn)
            f(*fargs)
            timer = timeit.Timer(lambda: f(*fargs))
            number, _ = timer.autorange()
            best[n] = min(timer.repeat(args.repeat, number)) / number
        row = f"{label:40s}" + "".join(f"{best[n] * 1e3:10.3f}ms" for n in names)
        if len(names) > 1:
            row += f"{best['python'] / best['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
