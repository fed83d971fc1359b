"""Numpy reference implementations of the two hot kernels.

Semantics are pinned here; the compiled extension in ``_core`` follows the
same iteration order and update rules so both backends reach the same
decisions (floating-point trajectories may differ after eigenvector sign
choices, the accepted/rejected outcomes must not).
"""
from __future__ import annotations

import math

import numpy as np

ARMIJO_SLOPE = 1e-4
ARMIJO_SHRINK = 0.5
MIN_STEP = 1e-20
GRAD_FLOOR = 1e-30


def min_eig_ascent(psis: np.ndarray, x0: np.ndarray, iterations: int, step_scale: float):
    """Maximize the minimum eigenvalue of ``sum_k x_k psis[k]`` over the unit ball.

    Projected supergradient ascent with step ``step_scale / sqrt(k)``; every
    row of ``x0`` seeds one independent restart.  Returns the best objective
    seen over all iterates, the coefficient vector achieving it, and the index
    of the restart that found it (ties keep the earliest restart).
    """
    psis = np.asarray(psis, dtype=float)
    x = np.array(x0, dtype=float, copy=True)
    restarts, d = x.shape
    best_val = np.full(restarts, -np.inf)
    best_x = x.copy()
    for k in range(1, iterations + 1):
        m = np.einsum("rk,kij->rij", x, psis)
        values, vectors = np.linalg.eigh(m)
        lam = values[:, 0]
        u = vectors[:, :, 0]
        improved = lam > best_val
        best_val[improved] = lam[improved]
        best_x[improved] = x[improved]
        grad = np.einsum("ri,kij,rj->rk", u, psis, u)
        x += (step_scale / math.sqrt(k)) * grad
        norms = np.linalg.norm(x, axis=1)
        np.divide(x, np.where(norms > 1.0, norms, 1.0)[:, None], out=x)
    winner = int(np.argmax(best_val))
    return float(best_val[winner]), best_x[winner].copy(), winner


def _edge_residuals(q, i_idx, j_idx, d2):
    diff = q[i_idx] - q[j_idx]
    res = np.einsum("ek,ek->e", diff, diff) - d2
    return diff, res


def edge_descent(q0: np.ndarray, edges: np.ndarray, d2: np.ndarray, max_iters: int, f_tol: float):
    """Drive the squared-length residuals of all edges to zero by gradient descent.

    Minimizes ``sum_e (|q_i - q_j|^2 - d2_e)^2`` with backtracking line search.
    Returns the final points, the final objective, and the iterations used.
    """
    q = np.array(q0, dtype=float, copy=True)
    edges = np.asarray(edges, dtype=np.int64)
    d2 = np.asarray(d2, dtype=float)
    i_idx, j_idx = edges[:, 0], edges[:, 1]
    diff, res = _edge_residuals(q, i_idx, j_idx, d2)
    f = float(res @ res)
    used = 0
    for t in range(1, max_iters + 1):
        used = t
        if f <= f_tol:
            break
        grad = np.zeros_like(q)
        coef = (4.0 * res)[:, None] * diff
        np.add.at(grad, i_idx, coef)
        np.subtract.at(grad, j_idx, coef)
        gn2 = float(np.einsum("ij,ij->", grad, grad))
        if gn2 <= GRAD_FLOOR:
            break
        alpha = 1.0
        accepted = False
        while alpha >= MIN_STEP:
            trial = q - alpha * grad
            tdiff, tres = _edge_residuals(trial, i_idx, j_idx, d2)
            tf = float(tres @ tres)
            if tf <= f - ARMIJO_SLOPE * alpha * gn2:
                q, f, diff, res = trial, tf, tdiff, tres
                accepted = True
                break
            alpha *= ARMIJO_SHRINK
        if not accepted:
            break
    return q, f, used
