"""Bar frameworks: graphs, point configurations, and geometric predicates.

Node labels are 0-based everywhere in this package; the JSON layer converts
to and from the 1-based labels used in files.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .errors import FrameworkError, UrigidError
from .numerics import DEFAULT_TOL, TolerancePolicy, numeric_rank

# Enumerating index subsets for the general-position test stops at this many
# subsets; past it the check is delegated to the null-space side.
DEFAULT_SUBSET_CAP = 100_000

_DET_CHUNK = 20_000


@dataclass(frozen=True)
class Graph:
    """Simple connected graph on nodes 0..n-1 with a sorted edge tuple."""

    n: int
    edges: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise FrameworkError(f"node count must be a positive integer, got {self.n!r}")
        normalized = []
        seen = set()
        for pair in self.edges:
            i, j = int(pair[0]), int(pair[1])
            if i == j:
                raise FrameworkError(f"loop edge ({i},{i}) not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise FrameworkError(f"edge ({i},{j}) out of range for {self.n} nodes")
            edge = (min(i, j), max(i, j))
            if edge in seen:
                raise FrameworkError(f"duplicate edge ({edge[0]},{edge[1]})")
            seen.add(edge)
            normalized.append(edge)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        if not self._connected():
            raise FrameworkError("graph is disconnected")

    def _connected(self) -> bool:
        if self.n == 1:
            return True
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self):
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(s) for s in adj)

    @cached_property
    def degrees(self):
        return tuple(len(s) for s in self.adjacency)

    @cached_property
    def is_complete(self) -> bool:
        return self.m == comb(self.n, 2)

    @cached_property
    def edge_set(self):
        return frozenset(self.edges)

    @cached_property
    def missing_edges(self):
        """All non-adjacent pairs (i, j), i < j, in lexicographic order."""
        return tuple(
            (i, j)
            for i, j in itertools.combinations(range(self.n), 2)
            if (i, j) not in self.edge_set
        )

    def non_neighbors(self, i: int):
        """Nodes distinct from ``i`` and not adjacent to it."""
        return tuple(j for j in range(self.n) if j != i and j not in self.adjacency[i])


@dataclass(frozen=True)
class Configuration:
    """Points p^0..p^(n-1) in R^r, stored as an immutable (n, r) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise FrameworkError(f"points must form an (n, r) array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise FrameworkError(f"need at least one point and one dimension, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise FrameworkError("points have non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def r(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Framework:
    """A graph together with a configuration of the same node count."""

    graph: Graph
    config: Configuration

    def __post_init__(self):
        if self.graph.n != self.config.n:
            raise FrameworkError(
                f"graph has {self.graph.n} nodes but configuration has {self.config.n} points"
            )

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def r(self) -> int:
        return self.config.r

    def edge_vectors(self) -> np.ndarray:
        """Difference vectors p^i - p^j for every edge, as an (m, r) array."""
        pts = self.config.points
        idx = np.asarray(self.graph.edges, dtype=int).reshape(-1, 2)
        return pts[idx[:, 0]] - pts[idx[:, 1]]


def augmented_matrix(config: Configuration) -> np.ndarray:
    """(r+1) x n matrix whose column i is the point p^i stacked on a 1."""
    return np.vstack([config.points.T, np.ones(config.n)])


def check_spanning(config: Configuration, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff the points affinely span R^r (augmented matrix has full row rank)."""
    return numeric_rank(augmented_matrix(config), tol) == config.r + 1


def distance_matrix(config: Configuration) -> np.ndarray:
    pts = config.points
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def distance_profile(fw: Framework) -> dict:
    """Map every edge to its bar length."""
    lengths = np.linalg.norm(fw.edge_vectors(), axis=1)
    return {edge: float(lengths[k]) for k, edge in enumerate(fw.graph.edges)}


def equivalent(fw_a: Framework, fw_b: Framework, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff the two frameworks share their graph and agree on all bar lengths.

    The configurations may live in different ambient dimensions.
    """
    if fw_a.n != fw_b.n or fw_a.graph.edges != fw_b.graph.edges:
        raise FrameworkError("equivalence is only defined for identical graphs")
    la = np.linalg.norm(fw_a.edge_vectors(), axis=1)
    lb = np.linalg.norm(fw_b.edge_vectors(), axis=1)
    scale = max(la.max(initial=0.0), lb.max(initial=0.0))
    return bool(np.abs(la - lb).max(initial=0.0) <= tol.residual_atol * scale)


def congruent(conf_a: Configuration, conf_b: Configuration, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff all pairwise distances agree (the configurations differ by a rigid motion)."""
    if conf_a.n != conf_b.n:
        raise FrameworkError("congruence is only defined for equal point counts")
    da = distance_matrix(conf_a)
    db = distance_matrix(conf_b)
    scale = max(float(da.max()), float(db.max()))
    return bool(np.abs(da - db).max() <= tol.residual_atol * scale)


def min_degree_check(fw: Framework) -> bool:
    """True iff every node has at least r+1 neighbors."""
    return min(fw.graph.degrees) >= fw.r + 1


def _subset_determinants_pass(rows: np.ndarray, size: int, rtol: float) -> bool:
    """All ``size``-subsets of ``rows`` give |det| above rtol times the Hadamard bound."""
    n = rows.shape[0]
    combos = itertools.combinations(range(n), size)
    while True:
        chunk = np.array(list(itertools.islice(combos, _DET_CHUNK)), dtype=int)
        if chunk.size == 0:
            return True
        sub = rows[chunk]  # (k, size, size)
        dets = np.abs(np.linalg.det(sub))
        bound = np.prod(np.linalg.norm(sub, axis=2), axis=1)
        if not np.all(dets > rtol * bound):
            return False


def is_general_position(
    config: Configuration,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_SUBSET_CAP,
    _allow_fallback: bool = True,
) -> bool:
    """True iff every r+1 of the points are affinely independent.

    Tested through scale-normalized determinants of (r+1)x(r+1) blocks of the
    augmented matrix; when there are more than ``cap`` subsets the equivalent
    null-space-side criterion is used instead.
    """
    n, r = config.n, config.r
    if n < r + 1:
        return True
    count = comb(n, r + 1)
    if count <= cap:
        rows = augmented_matrix(config).T  # row i = (p^i, 1)
        return _subset_determinants_pass(rows, r + 1, tol.rank_rtol)
    if _allow_fallback and n - 1 - r >= 1:
        from .gale import gale_basis, gale_general_position_check

        z = gale_basis(config, tol)
        return gale_general_position_check(z, tol, cap=cap, _allow_fallback=False)
    raise UrigidError(
        f"general-position check needs {count} subset determinants, above the cap of {cap}"
    )
