"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from hypres import kernels
from hypres.lorentz_core import random_hyperboloid_point
from hypres.poisson_operator import tangent_frame
from hypres.quadrature import sphere_rule


def _cases(rng):
    n = 3
    count = 100_000
    r = rng.uniform(0, 2, count)
    u = rng.standard_normal((count, n + 1))
    u /= np.linalg.norm(u, axis=1)[:, None]
    X = np.column_stack([np.cosh(r), np.sinh(r)[:, None] * u])
    v = rng.standard_normal((count, n + 1))
    v -= np.sum(v * u, axis=1)[:, None] * u
    v /= np.linalg.norm(v, axis=1)[:, None]
    XI = np.column_stack([np.zeros(count), v])
    x = random_hyperboloid_point(rng, 2)
    nodes, _ = sphere_rule(2, 96)
    F = tangent_frame(x)
    M = len(nodes)
    kw = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    W = rng.standard_normal((M, 3, 3, 3))
    return {"boundary_batch": ((X, XI),), "poisson_transport": ((x, F, nodes, -1),),
            "poisson_accumulate": ((kw, None, W),)}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    a = p.parse_args(argv)
    rng = np.random.default_rng(0)
    cases = _cases(rng)
    backends = ["python"]
    try:
        kernels.backend_module("cython")
        backends.append("cython")
    except ImportError:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<20}" + "".join(f"{b:>14}" for b in backends) + ("      speedup" if len(backends) == 2 else ""))
    for name, (args,) in cases.items():
        row = []
        for b in backends:
            mod = kernels.backend_module(b)
            fn = getattr(mod, name)
            if name == "poisson_accumulate":
                x, F, nodes, sign = cases["poisson_transport"][0]
                _, T = mod.poisson_transport(x, F, nodes, sign)
                args = (args[0], T, args[2])
            best = min(timeit.repeat(lambda: fn(*args), number=1, repeat=a.repeat))
            row.append(best)
        line = f"{name:<20}" + "".join(f"{t * 1e3:>11.2f} ms" for t in row)
        if len(row) == 2:
            line += f"   {row[0] / row[1]:>8.2f}x"
        print(line)


if __name__ == "__main__":
    main()
