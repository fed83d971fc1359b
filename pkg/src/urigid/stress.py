"""Equilibrium stresses, stress matrices, and the max-rank PSD stress search.

An equilibrium stress is a vector of edge weights, ordered like
``framework.graph.edges``, whose weighted edge-direction sums vanish at every
node.  The associated stress matrix carries the negated weights off-diagonal,
zeros at missing edges, and row sums on the diagonal; its columns always lie
in the null space of the augmented matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalError, UrigidError
from .framework import Framework, augmented_matrix
from .gale import gale_basis
from .numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    max_abs,
    nullspace_basis,
    numeric_rank,
)


def equilibrium_system(fw: Framework) -> np.ndarray:
    """(r*n) x m matrix whose kernel is exactly the space of equilibrium stresses.

    The column for edge (i, j) contributes p^i - p^j to the node-i block and
    the negation to the node-j block.
    """
    n, r = fw.n, fw.r
    pts = fw.config.points
    system = np.zeros((r * n, fw.graph.m))
    for col, (i, j) in enumerate(fw.graph.edges):
        d = pts[i] - pts[j]
        system[r * i : r * (i + 1), col] = d
        system[r * j : r * (j + 1), col] = -d
    return system


def equilibrium_residual(fw: Framework, omega) -> float:
    """Largest violated node-balance component for the given edge weights."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (fw.graph.m,):
        raise UrigidError(f"expected {fw.graph.m} edge weights, got shape {omega.shape}")
    return max_abs(equilibrium_system(fw) @ omega)


def stress_space_basis(fw: Framework, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the equilibrium stress space, one stress per column."""
    return nullspace_basis(equilibrium_system(fw), tol)


def assemble_stress(fw: Framework, omega, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Build the n x n stress matrix for the edge weights ``omega``.

    Missing-edge entries are exact zeros.  Raises when the weights fail the
    node-balance condition beyond tolerance.
    """
    omega = np.asarray(omega, dtype=float)
    residual = equilibrium_residual(fw, omega)
    scale = max(1.0, max_abs(fw.config.points) * max_abs(omega) * max(fw.graph.degrees))
    if residual > tol.residual_atol * scale:
        raise NumericalError(
            f"edge weights are not an equilibrium stress (residual {residual:.3e})"
        )
    n = fw.n
    s = np.zeros((n, n))
    for k, (i, j) in enumerate(fw.graph.edges):
        w = omega[k]
        s[i, j] = -w
        s[j, i] = -w
        s[i, i] += w
        s[j, j] += w
    return s


@dataclass(frozen=True)
class StressReport:
    """Validation summary for a candidate stress matrix."""

    symmetry_violation: float
    pattern_violation: float
    equilibrium_residual: float
    eigenvalues: np.ndarray
    rank: int
    target_rank: int
    lambda_min: float
    lambda_max: float
    symmetric_ok: bool
    pattern_ok: bool
    equilibrium_ok: bool
    psd: bool
    max_rank: bool

    @property
    def certifies(self) -> bool:
        """PSD of maximum rank with the correct support and null space."""
        return (
            self.symmetric_ok
            and self.pattern_ok
            and self.equilibrium_ok
            and self.psd
            and self.max_rank
        )


def validate_stress(fw: Framework, s, tol: TolerancePolicy = DEFAULT_TOL) -> StressReport:
    """Recompute every stress-matrix property from scratch; never raises on failures."""
    s = as_matrix(s)
    n, r = fw.n, fw.r
    if s.shape != (n, n):
        raise UrigidError(f"stress matrix shape {s.shape} does not match n={n}")
    scale = max(1.0, max_abs(s))
    symmetry_violation = max_abs(s - s.T)

    pattern_violation = 0.0
    for i, j in fw.graph.missing_edges:
        pattern_violation = max(pattern_violation, abs(s[i, j]), abs(s[j, i]))

    a = augmented_matrix(fw.config)
    eq_residual = max_abs(a @ s)
    eq_scale = max(1.0, max_abs(a) * scale * n)

    sym = 0.5 * (s + s.T)
    eigenvalues = np.linalg.eigvalsh(sym)
    lam_min = float(eigenvalues[0])
    lam_max = float(eigenvalues[-1])
    rank = numeric_rank(sym, tol)
    target = n - r - 1
    return StressReport(
        symmetry_violation=symmetry_violation,
        pattern_violation=pattern_violation,
        equilibrium_residual=eq_residual,
        eigenvalues=eigenvalues,
        rank=rank,
        target_rank=target,
        lambda_min=lam_min,
        lambda_max=lam_max,
        symmetric_ok=symmetry_violation <= tol.residual_atol * scale,
        pattern_ok=pattern_violation <= tol.residual_atol * scale,
        equilibrium_ok=eq_residual <= tol.residual_atol * eq_scale,
        psd=lam_min >= -tol.psd_atol * max(1.0, lam_max),
        max_rank=rank == target,
    )


def reduced_stress(s, z, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Symmetric factor Q with S = Z Q Z^T for a stress matrix supported on span(Z).

    Q inherits rank and definiteness from S whenever Z has full column rank.
    Raises when S cannot be reproduced from the factor within tolerance.
    """
    s = as_matrix(s)
    z = as_matrix(z)
    gram = z.T @ z
    q = np.linalg.solve(gram, z.T @ s @ z)
    q = np.linalg.solve(gram, q.T).T
    q = 0.5 * (q + q.T)
    residual = max_abs(z @ q @ z.T - s)
    if residual > tol.residual_atol * max(1.0, max_abs(s)):
        raise NumericalError(
            f"stress matrix is not supported on the given null-space basis (residual {residual:.3e})"
        )
    return q


@dataclass(frozen=True)
class StressSearchOptions:
    """Pinned parameters of the supergradient search; defaults are the contract."""

    restarts: int = 8
    iterations: int = 10_000
    step_scale: float = 1.0
    seed: int = 0
    accept_factor: float = 10.0


@dataclass
class StressSearchResult:
    """Everything the search produced, whether or not it accepted."""

    basis: np.ndarray
    objective: float | None = None
    restart: int | None = None
    coefficients: np.ndarray | None = None
    omega: np.ndarray | None = None
    matrix: np.ndarray | None = None
    report: StressReport | None = None
    accepted: bool = False

    @property
    def basis_dim(self) -> int:
        return self.basis.shape[1]


def max_rank_stress_search(
    fw: Framework,
    tol: TolerancePolicy = DEFAULT_TOL,
    options: StressSearchOptions | None = None,
) -> StressSearchResult:
    """Search the stress space for a PSD stress matrix of rank n-r-1.

    Every basis stress is reduced to its symmetric factor on a null-space
    basis; the search then maximizes the minimum eigenvalue of coefficient
    combinations over the unit ball by projected supergradient ascent with
    deterministic seeded restarts.  The candidate is accepted only when the
    optimum clears ``accept_factor * psd_atol`` and the assembled matrix
    revalidates as PSD of maximum rank.
    """
    opts = options or StressSearchOptions()
    basis = stress_space_basis(fw, tol)
    result = StressSearchResult(basis=basis)
    n, r = fw.n, fw.r
    if basis.shape[1] == 0 or n - 1 - r < 1:
        return result
    z = gale_basis(fw.config, tol)
    reduced = np.stack(
        [reduced_stress(assemble_stress(fw, basis[:, k], tol), z, tol) for k in range(basis.shape[1])]
    )
    rng = np.random.default_rng(opts.seed)
    x0 = rng.standard_normal((opts.restarts, basis.shape[1]))
    x0 /= np.linalg.norm(x0, axis=1, keepdims=True)
    best_val, best_x, best_restart = _kernels.min_eig_ascent(
        reduced, x0, opts.iterations, opts.step_scale
    )
    result.objective = best_val
    result.restart = best_restart
    result.coefficients = best_x
    if best_val <= opts.accept_factor * tol.psd_atol:
        return result
    omega = basis @ best_x
    s = assemble_stress(fw, omega, tol)
    report = validate_stress(fw, s, tol)
    result.omega = omega
    result.matrix = s
    result.report = report
    result.accepted = bool(report.certifies)
    return result


def find_max_rank_psd_stress(
    fw: Framework,
    tol: TolerancePolicy = DEFAULT_TOL,
    options: StressSearchOptions | None = None,
):
    """Return (omega, stress_matrix) certifying PSD maximum rank, or None.

    Absence of a result is a legitimate outcome, not a refutation.
    """
    result = max_rank_stress_search(fw, tol, options)
    if not result.accepted:
        return None
    return result.omega, result.matrix
