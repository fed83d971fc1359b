"""Hot numeric kernels with a compiled fast path.

The eigenvalue ascent inside the stress search and the distance descent
inside the refutation harness dominate runtime.  A Cython extension
(``urigid._kernels._core``) implements both; the numpy fallback in
``urigid._kernels.pure`` is selected at import time when the extension is
unavailable or when ``URIGID_PURE_PYTHON`` is set in the environment.
"""
from __future__ import annotations

import os

import numpy as np

from . import pure

if os.environ.get("URIGID_PURE_PYTHON"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "python"


def backend_name() -> str:
    """Which kernel implementation is active: "cython" or "python"."""
    return BACKEND


def min_eig_ascent(psis, x0, iterations: int, step_scale: float):
    """See :func:`urigid._kernels.pure.min_eig_ascent`."""
    psis = np.ascontiguousarray(psis, dtype=float)
    x0 = np.ascontiguousarray(x0, dtype=float)
    if psis.ndim != 3 or psis.shape[1] != psis.shape[2]:
        raise ValueError(f"expected stacked square matrices, got shape {psis.shape}")
    if x0.ndim != 2 or x0.shape[1] != psis.shape[0]:
        raise ValueError(f"restart block shape {x0.shape} does not match {psis.shape[0]} matrices")
    if iterations < 1:
        raise ValueError("iterations must be positive")
    return _impl.min_eig_ascent(psis, x0, int(iterations), float(step_scale))


def edge_descent(q0, edges, d2, max_iters: int, f_tol: float):
    """See :func:`urigid._kernels.pure.edge_descent`."""
    q0 = np.ascontiguousarray(q0, dtype=float)
    edges = np.ascontiguousarray(edges, dtype=np.int64)
    d2 = np.ascontiguousarray(d2, dtype=float)
    if q0.ndim != 2:
        raise ValueError(f"expected an (n, s) point block, got shape {q0.shape}")
    if edges.ndim != 2 or edges.shape[1] != 2 or edges.shape[0] != d2.shape[0]:
        raise ValueError("edge index block and squared-length targets do not match")
    return _impl.edge_descent(q0, edges, d2, int(max_iters), float(f_tol))
