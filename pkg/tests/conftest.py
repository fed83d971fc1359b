"""Shared corpus builders for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from urigid.framework import Framework, Graph
from urigid.generators import lateration_graph, named_examples, random_general_position
from urigid.numerics import TolerancePolicy

# Corpus configurations are drawn with a general-position margin: a uniform
# draw can contain an almost-degenerate point subset that passes the default
# 1e-9 cutoff yet leaves no numerically max-rank PSD stress at all, which
# would test conditioning rather than the certification chain.
CORPUS_GP_TOL = TolerancePolicy(rank_rtol=1e-5)


def lateration_framework(n: int, r: int, seed: int) -> Framework:
    return Framework(
        lateration_graph(n, r), random_general_position(n, r, seed=seed, tol=CORPUS_GP_TOL)
    )


def degree_deficient_framework(n: int, r: int, seed: int) -> Framework:
    """Lateration framework with one edge removed at the last node (degree drops to r)."""
    graph = lateration_graph(n, r)
    last = n - 1
    edges = list(graph.edges)
    incident = [e for e in edges if last in e]
    edges.remove(incident[0])
    return Framework(
        Graph(n, tuple(edges)), random_general_position(n, r, seed=seed, tol=CORPUS_GP_TOL)
    )


def random_subgraph_framework(n: int, r: int, seed: int, extra_edges: int = 2) -> Framework:
    """Connected random subgraph (spanning tree plus extras) with at least one missing edge."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = set()
    for idx in range(1, n):
        parent = order[rng.integers(0, idx)]
        edges.add((min(parent, order[idx]), max(parent, order[idx])))
    candidates = [
        (i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges
    ]
    rng.shuffle(candidates)
    for edge in candidates[: max(0, min(extra_edges, len(candidates) - 1))]:
        edges.add(edge)
    graph = Graph(n, tuple(sorted(edges)))
    assert graph.missing_edges, "corpus builder must leave at least one missing edge"
    return Framework(graph, random_general_position(n, r, seed=seed + 1000, tol=CORPUS_GP_TOL))


@pytest.fixture(scope="session")
def fixtures_by_name():
    return dict(named_examples())
