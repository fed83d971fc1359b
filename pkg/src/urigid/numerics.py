"""Tolerance-aware dense linear algebra shared by all analysis modules.

Matrices are plain float64 numpy arrays.  Rank decisions are relative to the
largest singular value, PSD decisions allow a small eigenvalue floor, and
residuals are judged relative to the operand scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, UrigidError


@dataclass(frozen=True)
class TolerancePolicy:
    """Numeric cutoffs used by every rank / PSD / residual decision.

    rank_rtol:     singular values below ``rank_rtol * sigma_max`` count as zero
    psd_atol:      eigenvalues above ``-psd_atol * max(1, lambda_max)`` count as nonnegative
    residual_atol: linear-system residual bound, relative to the operand scale
    """

    rank_rtol: float = 1e-9
    psd_atol: float = 1e-9
    residual_atol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rtol", "psd_atol", "residual_atol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0.0):
                raise UrigidError(f"tolerance {name} must be strictly positive, got {value!r}")
        if self.rank_rtol >= 1.0:
            raise UrigidError(f"rank_rtol must be < 1, got {self.rank_rtol!r}")


DEFAULT_TOL = TolerancePolicy()


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite float64 2-d array, raising on bad input."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise UrigidError(f"expected a 2-d matrix, got array of shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise UrigidError("matrix has non-finite entries")
    return a


def max_abs(m) -> float:
    a = np.asarray(m, dtype=float)
    return float(np.abs(a).max()) if a.size else 0.0


def numeric_rank(m, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_rtol`` times the largest one."""
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rtol * s[0]))


def nullspace_basis(m, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the right null space of ``m``.

    Columns are ordered by decreasing distance from the row space, i.e. the
    last column is the direction of the smallest singular value.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0))
    if rows == 0:
        return np.eye(cols)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol.rank_rtol * smax)) if smax > 0.0 else 0
    return vh[rank:].T.copy()


def sym_eigen(m, tol: TolerancePolicy = DEFAULT_TOL):
    """Eigendecomposition of a symmetric matrix: ascending values, orthonormal vectors."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise UrigidError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, max_abs(a))
    asym = max_abs(a - a.T)
    if asym > tol.residual_atol * scale:
        raise NumericalError(f"matrix is not symmetric within tolerance (deviation {asym:.3e})")
    values, vectors = np.linalg.eigh(0.5 * (a + a.T))
    return values, vectors


def psd_sqrt(m, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Symmetric square root of a PSD matrix; slightly negative eigenvalues are clamped."""
    values, vectors = sym_eigen(m, tol)
    lam_max = float(values[-1]) if values.size else 0.0
    floor = -tol.psd_atol * max(1.0, lam_max)
    if values.size and float(values[0]) < floor:
        raise NumericalError(
            f"matrix is not positive semidefinite (min eigenvalue {values[0]:.3e})"
        )
    clamped = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(clamped)) @ vectors.T
