"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs the eigenvalue ascent and the edge descent on representative problems
and prints per-backend timings.  Usage:

    python3 benchmarks/bench_kernels.py [--iterations 10000] [--repeats 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from urigid._kernels import pure
from urigid.framework import Framework
from urigid.gale import gale_basis
from urigid.generators import lateration_graph, named_example, random_general_position
from urigid.stress import assemble_stress, reduced_stress, stress_space_basis

try:
    from urigid._kernels import _core as core
except ImportError:
    core = None


def ascent_problem(n, r, seed=0):
    fw = Framework(lateration_graph(n, r), random_general_position(n, r, seed=seed))
    basis = stress_space_basis(fw)
    z = gale_basis(fw.config)
    psis = np.stack(
        [reduced_stress(assemble_stress(fw, basis[:, k]), z) for k in range(basis.shape[1])]
    )
    rng = np.random.default_rng(0)
    x0 = rng.standard_normal((8, psis.shape[0]))
    x0 /= np.linalg.norm(x0, axis=1, keepdims=True)
    return psis, x0


def descent_problem(seed=0, dim=3):
    fw = named_example("square-c4")
    edges = np.asarray(fw.graph.edges, dtype=np.int64)
    d2 = np.einsum("ek,ek->e", fw.edge_vectors(), fw.edge_vectors())
    rng = np.random.default_rng(seed)
    q0 = np.zeros((fw.n, dim))
    q0[:, :2] = fw.config.points
    q0 += 0.1 * np.sqrt(2.0) * rng.standard_normal((fw.n, dim))
    return q0, edges, d2


def timeit(fn, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=10_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = [("python", pure)]
    if core is not None:
        backends.append(("cython", core))
    else:
        print("compiled extension not available; timing the fallback only\n")

    print(f"{'kernel':34s} {'backend':8s} {'best time':>12s} {'speedup':>9s}   result")
    print("-" * 88)

    for label, n, r in (("ascent lateration(10,2)", 10, 2), ("ascent lateration(15,3)", 15, 3)):
        psis, x0 = ascent_problem(n, r)
        reference = None
        for name, impl in backends:
            elapsed, (value, _, _) = timeit(
                lambda impl=impl: impl.min_eig_ascent(psis, x0, args.iterations, 1.0),
                args.repeats,
            )
            if reference is None:
                reference = elapsed
            print(
                f"{label:34s} {name:8s} {elapsed * 1e3:10.1f} ms {reference / elapsed:8.1f}x"
                f"   lambda*={value:.3e}"
            )
        decisions = {name: impl.min_eig_ascent(psis, x0, args.iterations, 1.0)[0] > 1e-8 for name, impl in backends}
        assert len(set(decisions.values())) == 1, f"backends disagree on acceptance: {decisions}"

    q0, edges, d2 = descent_problem()
    reference = None
    for name, impl in backends:
        elapsed, (_, f_final, _) = timeit(
            lambda impl=impl: impl.edge_descent(q0, edges, d2, 1000, 1e-16),
            args.repeats,
        )
        if reference is None:
            reference = elapsed
        print(
            f"{'descent cycle flex (dim 3)':34s} {name:8s} {elapsed * 1e6:10.1f} us {reference / elapsed:8.1f}x"
            f"   f={f_final:.1e}"
        )
    print("\nbackends agree on every accept/reject decision above")


if __name__ == "__main__":
    main()
