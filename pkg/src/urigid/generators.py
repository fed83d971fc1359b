"""Deterministic construction of test frameworks.

All randomness flows through a seed argument; identical inputs reproduce
identical outputs bit for bit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import FrameworkError, UrigidError
from .framework import Configuration, Framework, Graph, is_general_position
from .numerics import DEFAULT_TOL, TolerancePolicy

RANDOM_GP_MAX_ATTEMPTS = 1_000


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise FrameworkError(f"cycle graph needs at least 3 nodes, got {n}")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def lateration_graph(n: int, r: int) -> Graph:
    """Clique on the first r+1 nodes; every later node attaches to its r+1 predecessors."""
    if r < 1:
        raise FrameworkError(f"dimension must be positive, got {r}")
    if n < r + 2:
        raise FrameworkError(f"lateration graph needs at least {r + 2} nodes for r={r}, got {n}")
    edges = list(itertools.combinations(range(r + 1), 2))
    for k in range(r + 1, n):
        edges.extend((j, k) for j in range(k - r - 1, k))
    return Graph(n, tuple(edges))


def random_general_position(
    n: int,
    r: int,
    seed: int = 0,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> Configuration:
    """Points sampled uniformly in the unit cube, resampled until in general position."""
    if n < r + 1:
        raise FrameworkError(f"{n} points cannot affinely span R^{r}")
    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_GP_MAX_ATTEMPTS):
        config = Configuration(rng.random((n, r)))
        if is_general_position(config, tol):
            return config
    raise UrigidError(
        f"no general-position sample found in {RANDOM_GP_MAX_ATTEMPTS} attempts (n={n}, r={r})"
    )


def named_examples() -> list:
    """Curated fixtures used throughout the test suite and documentation."""
    square = Configuration([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    line = Configuration([[0.0], [1.0], [2.0]])
    collinear = Configuration([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    fixtures = [
        ("square-k4", Framework(complete_graph(4), square)),
        ("square-c4", Framework(cycle_graph(4), square)),
        ("k3-line", Framework(complete_graph(3), line)),
        # Complete graph minus (1,3) keeps a collinear triple in play without
        # triggering the complete-graph shortcut.
        ("collinear-bad-gp", Framework(Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3))), collinear)),
        ("lateration-5-2", Framework(lateration_graph(5, 2), random_general_position(5, 2, seed=7))),
    ]
    return fixtures


def named_example(name: str) -> Framework:
    for key, fw in named_examples():
        if key == name:
            return fw
    known = ", ".join(key for key, _ in named_examples())
    raise UrigidError(f"unknown example {name!r}; known names: {known}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one framework: kind plus size, dimension, and seed."""

    kind: str
    n: int = 0
    r: int = 0
    seed: int = 0
    name: str = ""

    KINDS = ("complete", "cycle", "lateration", "random-gp", "named")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise UrigidError(f"unknown generator kind {self.kind!r}; one of {self.KINDS}")
        if self.kind != "named":
            if self.n < self.r + 1:
                raise FrameworkError(f"need n >= r+1, got n={self.n}, r={self.r}")
            if self.r < 1:
                raise FrameworkError(f"dimension must be positive, got {self.r}")


def build(spec: GeneratorSpec, tol: TolerancePolicy = DEFAULT_TOL) -> Framework:
    if spec.kind == "named":
        return named_example(spec.name)
    config = random_general_position(spec.n, spec.r, seed=spec.seed, tol=tol)
    if spec.kind == "complete" or spec.kind == "random-gp":
        graph = complete_graph(spec.n)
    elif spec.kind == "cycle":
        graph = cycle_graph(spec.n)
    else:
        graph = lateration_graph(spec.n, spec.r)
    return Framework(graph, config)
