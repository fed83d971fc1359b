"""Affine-flex detection and construction.

Two independent linear systems decide whether a framework admits an
affinely-equivalent, non-congruent realization:

* the edge-direction route: a nonzero symmetric matrix annihilating the
  quadratic form of every edge direction (a quadric at infinity);
* the missing-edge route: nonzero coefficients on the non-edges whose
  patterned matrix, centered and multiplied by a null-space basis of the
  augmented matrix, vanishes.

Both kernels are trivial or nontrivial together; the second, in its reduced
form on a canonical basis, is what the certification pipeline checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameworkError, NumericalError, UrigidError
from .framework import Configuration, Framework
from .gale import canonical_pattern_ok
from .numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    nullspace_basis,
    psd_sqrt,
    sym_eigen,
)


def sym_basis_dim(r: int) -> int:
    return r * (r + 1) // 2


def sym_to_vec(phi: np.ndarray) -> np.ndarray:
    """Flatten a symmetric matrix: diagonal first, then upper off-diagonals by rows."""
    phi = np.asarray(phi, dtype=float)
    r = phi.shape[0]
    off = [phi[k, l] for k in range(r) for l in range(k + 1, r)]
    return np.concatenate([np.diag(phi), np.asarray(off, dtype=float)])


def vec_to_sym(v: np.ndarray, r: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (sym_basis_dim(r),):
        raise UrigidError(f"expected {sym_basis_dim(r)} coefficients for r={r}, got {v.shape}")
    phi = np.diag(v[:r]).astype(float)
    idx = r
    for k in range(r):
        for l in range(k + 1, r):
            phi[k, l] = v[idx]
            phi[l, k] = v[idx]
            idx += 1
    return phi


def quadratic_form_row(d: np.ndarray) -> np.ndarray:
    """Coefficients of phi -> d^T phi d in the symmetric basis of sym_to_vec."""
    d = np.asarray(d, dtype=float)
    r = d.shape[0]
    off = [2.0 * d[k] * d[l] for k in range(r) for l in range(k + 1, r)]
    return np.concatenate([d * d, np.asarray(off, dtype=float)])


def edge_quadric_system(fw: Framework) -> np.ndarray:
    """m x r(r+1)/2 system whose kernel vectors are the quadric witnesses."""
    return np.vstack([quadratic_form_row(d) for d in fw.edge_vectors()])


def quadric_residual(fw: Framework, phi) -> float:
    """Largest |d^T phi d| over the edge directions d."""
    phi = as_matrix(phi)
    diffs = fw.edge_vectors()
    return float(np.abs(np.einsum("ek,kl,el->e", diffs, phi, diffs)).max())


def detect_quadric_at_infinity(fw: Framework, tol: TolerancePolicy = DEFAULT_TOL):
    """Unit-Frobenius quadric witness, or None when the kernel is trivial.

    None means no affinely-equivalent non-congruent realization exists in the
    ambient dimension.  The returned witness is deterministic: the direction
    of the smallest singular value, scaled to unit Frobenius norm with its
    first nonzero entry positive.
    """
    system = edge_quadric_system(fw)
    kernel = nullspace_basis(system, tol)
    if kernel.shape[1] == 0:
        return None
    phi = vec_to_sym(kernel[:, -1], fw.r)
    phi /= np.linalg.norm(phi)
    flat = phi.ravel()
    lead = flat[np.abs(flat) > 1e-12 * np.abs(flat).max()]
    if lead.size and lead[0] < 0:
        phi = -phi
    return phi


def mean_centering_basis(n: int) -> np.ndarray:
    """n x (n-1) matrix with orthonormal columns orthogonal to the all-ones vector.

    Built by a Householder reflection sending the first coordinate axis to the
    normalized all-ones vector, so the construction is deterministic.
    """
    if n < 2:
        raise FrameworkError(f"need at least 2 nodes, got {n}")
    ones = np.full(n, 1.0 / np.sqrt(n))
    v = ones - np.eye(n)[0]
    h = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    return h[:, 1:]


def missing_edge_matrix(fw: Framework, y) -> np.ndarray:
    """Symmetric n x n matrix carrying ``y`` on the missing edges, zero elsewhere."""
    missing = fw.graph.missing_edges
    y = np.asarray(y, dtype=float)
    if y.shape != (len(missing),):
        raise UrigidError(f"expected {len(missing)} missing-edge coefficients, got shape {y.shape}")
    e = np.zeros((fw.n, fw.n))
    for k, (i, j) in enumerate(missing):
        e[i, j] = y[k]
        e[j, i] = y[k]
    return e


def missing_edge_system(fw: Framework, z: np.ndarray) -> np.ndarray:
    """((n-1)*rbar) x mbar system sending missing-edge coefficients to the centered product.

    Column k is the flattening of V^T E_k Z where E_k carries a single
    symmetric 1 at the k-th missing edge and V is the mean-centering basis.
    A nontrivial kernel is equivalent to the edge directions lying on a
    quadric at infinity.
    """
    z = as_matrix(z)
    missing = fw.graph.missing_edges
    if not missing:
        raise FrameworkError("graph is complete: no missing edges")
    if z.shape[0] != fw.n:
        raise UrigidError(f"null-space basis has {z.shape[0]} rows, expected {fw.n}")
    vt = mean_centering_basis(fw.n).T
    cols = []
    for i, j in missing:
        block = np.outer(vt[:, i], z[j]) + np.outer(vt[:, j], z[i])
        cols.append(block.ravel())
    return np.column_stack(cols)


def missing_edge_system_canonical(
    fw: Framework,
    zhat: np.ndarray,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> np.ndarray:
    """(n*rbar) x mbar reduced system E(y) Zhat = 0 for a canonical basis.

    Valid only when ``zhat`` carries the canonical zero pattern (column j
    vanishing at rows non-adjacent to node j+r+1); with that pattern the
    kernel coincides with the kernel of :func:`missing_edge_system`.
    """
    zhat = as_matrix(zhat)
    missing = fw.graph.missing_edges
    if not missing:
        raise FrameworkError("graph is complete: no missing edges")
    if zhat.shape[0] != fw.n:
        raise UrigidError(f"basis has {zhat.shape[0]} rows, expected {fw.n}")
    if not canonical_pattern_ok(fw, zhat, tol):
        raise NumericalError("basis does not carry the canonical zero pattern")
    rbar = zhat.shape[1]
    cols = []
    for i, j in missing:
        block = np.zeros((fw.n, rbar))
        block[i] = zhat[j]
        block[j] = zhat[i]
        cols.append(block.ravel())
    return np.column_stack(cols)


@dataclass(frozen=True)
class FlexMotion:
    """A nonsingular affine map q = A p + b witnessing flexibility, with its source quadric."""

    matrix: np.ndarray
    offset: np.ndarray
    scale: float
    quadric: np.ndarray
    flexed: Configuration


def flex_motion_from_quadric(fw: Framework, phi, tol: TolerancePolicy = DEFAULT_TOL) -> FlexMotion:
    """Turn a quadric witness into an explicit equivalent, non-congruent configuration.

    With t = 1 / (2 max|eigenvalue|) the matrix I + t*phi is positive definite
    with spectrum in [1/2, 3/2]; its symmetric square root A preserves every
    edge length exactly (the quadric kills the first-order term) while moving
    some non-edge distance, because A is not orthogonal and the points span.
    """
    phi = as_matrix(phi)
    r = fw.r
    if phi.shape != (r, r):
        raise UrigidError(f"quadric shape {phi.shape} does not match r={r}")
    fro = float(np.linalg.norm(phi))
    if fro == 0.0:
        raise UrigidError("zero quadric cannot witness a flex")
    max_len2 = float(np.max(np.einsum("ek,ek->e", fw.edge_vectors(), fw.edge_vectors())))
    residual = quadric_residual(fw, phi)
    if residual > tol.residual_atol * fro * max_len2:
        raise NumericalError(
            f"quadric does not annihilate the edge directions (residual {residual:.3e})"
        )
    values, _ = sym_eigen(phi, tol)
    t = 1.0 / (2.0 * float(np.abs(values).max()))
    a_mat = psd_sqrt(np.eye(r) + t * phi, tol)
    flexed = Configuration(fw.config.points @ a_mat.T)
    old = np.linalg.norm(fw.edge_vectors(), axis=1)
    new = np.linalg.norm(Framework(fw.graph, flexed).edge_vectors(), axis=1)
    drift = float(np.abs(old - new).max() / old.max())
    if drift > 1e-10:
        raise NumericalError(f"flex construction failed to preserve edge lengths (drift {drift:.3e})")
    return FlexMotion(
        matrix=a_mat,
        offset=np.zeros(r),
        scale=t,
        quadric=phi.copy(),
        flexed=flexed,
    )
