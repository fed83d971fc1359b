"""Null-space bases of the augmented matrix and their zero-pattern variants.

A Gale basis for a configuration is any n x (n-1-r) matrix whose columns span
the null space of the augmented matrix.  When a framework carries a stress
matrix of maximum rank, the last n-1-r columns of that stress matrix form a
basis with exact zeros at rows non-adjacent to the trailing nodes; that zero
pattern is what makes the reduced missing-edge system usable.
"""
from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .errors import FrameworkError, NumericalError, UrigidError
from .framework import (
    DEFAULT_SUBSET_CAP,
    Configuration,
    Framework,
    augmented_matrix,
    is_general_position,
)
from .numerics import DEFAULT_TOL, TolerancePolicy, max_abs, nullspace_basis, numeric_rank

_DET_CHUNK = 20_000


def gale_basis(config: Configuration, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal null-space basis of the augmented matrix, shape (n, n-1-r)."""
    n, r = config.n, config.r
    rbar = n - 1 - r
    if rbar < 1:
        raise FrameworkError(f"null space is trivial for n={n}, r={r}; no basis exists")
    a = augmented_matrix(config)
    if numeric_rank(a, tol) != r + 1:
        raise FrameworkError("configuration does not affinely span R^r")
    z = nullspace_basis(a, tol)
    if z.shape[1] != rbar:
        raise NumericalError(f"null space dimension {z.shape[1]} != expected {rbar}")
    return z


def gale_general_position_check(
    z: np.ndarray,
    tol: TolerancePolicy = DEFAULT_TOL,
    cap: int = DEFAULT_SUBSET_CAP,
    config: Configuration | None = None,
    _allow_fallback: bool = True,
) -> bool:
    """True iff every square row-submatrix of the null-space basis is nonsingular.

    Equivalent to the point-side general-position property.  Falls back to the
    point-side determinant test (when ``config`` is given) if enumeration would
    exceed ``cap`` subsets.
    """
    z = np.asarray(z, dtype=float)
    n, rbar = z.shape
    if rbar < 1 or rbar > n:
        raise UrigidError(f"invalid null-space basis shape {z.shape}")
    # Normalize against the largest row, not per-subset row products: a
    # numerically zero row would otherwise cancel out of its own 1x1 test.
    row_scale = float(np.linalg.norm(z, axis=1).max())
    if row_scale == 0.0:
        return False
    count = comb(n, rbar)
    if count <= cap:
        bound = row_scale**rbar  # Hadamard bound over any rbar rows
        combos = itertools.combinations(range(n), rbar)
        while True:
            chunk = np.array(list(itertools.islice(combos, _DET_CHUNK)), dtype=int)
            if chunk.size == 0:
                return True
            dets = np.abs(np.linalg.det(z[chunk]))
            if not np.all(dets > tol.rank_rtol * bound):
                return False
    if _allow_fallback and config is not None:
        return is_general_position(config, tol, cap=cap, _allow_fallback=False)
    raise UrigidError(
        f"general-position check needs {count} submatrix determinants, above the cap of {cap},"
        " and no point-side fallback is available"
    )


def canonical_pattern_ok(fw: Framework, zhat: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Check the zero pattern: column j of ``zhat`` vanishes at rows non-adjacent to node j+r+1."""
    zhat = np.asarray(zhat, dtype=float)
    r = fw.r
    scale = max(1.0, max_abs(zhat))
    for j in range(zhat.shape[1]):
        node = j + r + 1
        for i in fw.graph.non_neighbors(node):
            if abs(zhat[i, j]) > tol.residual_atol * scale:
                return False
    return True


def canonical_gale(fw: Framework, s: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Extract the last n-1-r columns of a max-rank stress matrix as a Gale basis.

    Direct column extraction keeps the non-edge zeros of the stress matrix
    exact, which the reduced missing-edge system relies on.  Raises when the
    extracted columns are rank deficient (the configuration is not in general
    position or the stress matrix does not have maximum rank).
    """
    s = np.asarray(s, dtype=float)
    n, r = fw.n, fw.r
    rbar = n - 1 - r
    if rbar < 1:
        raise FrameworkError(f"no null-space basis exists for n={n}, r={r}")
    if s.shape != (n, n):
        raise UrigidError(f"stress matrix shape {s.shape} does not match n={n}")
    zhat = s[:, r + 1 :].copy()
    if not canonical_pattern_ok(fw, zhat, tol):
        raise NumericalError("zero pattern violated in the extracted columns")
    if numeric_rank(zhat, tol) != rbar:
        raise NumericalError(
            "extracted stress-matrix columns are rank deficient; the general-position or"
            " maximum-rank hypothesis fails"
        )
    a = augmented_matrix(fw.config)
    residual = max_abs(a @ zhat)
    scale = max(1.0, max_abs(a) * max_abs(zhat) * n)
    if residual > tol.residual_atol * scale:
        raise NumericalError(f"extracted columns are not in the null space (residual {residual:.3e})")
    return zhat


def canonical_gale_product(
    fw: Framework,
    s: np.ndarray,
    z: np.ndarray | None = None,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> np.ndarray:
    """Cross-check construction of the canonical basis as Z Q Z2^T.

    Here Q is the reduced symmetric factor with S = Z Q Z^T and Z2 is the
    bottom square block of Z.  Agrees with :func:`canonical_gale` up to
    roundoff; kept as an independent path for validation.
    """
    s = np.asarray(s, dtype=float)
    n, r = fw.n, fw.r
    rbar = n - 1 - r
    if z is None:
        z = gale_basis(fw.config, tol)
    gram = z.T @ z
    q = np.linalg.solve(gram, z.T @ s @ z)
    q = np.linalg.solve(gram, q.T).T
    q = 0.5 * (q + q.T)
    z2 = z[n - rbar :, :]
    return z @ q @ z2.T
