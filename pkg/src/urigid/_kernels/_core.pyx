# Compiled implementations of the two hot kernels.  Semantics mirror
# urigid._kernels.pure; keep both in sync.

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt
from scipy.linalg.cython_lapack cimport dsyev

cnp.import_array()

cdef double ARMIJO_SLOPE = 1e-4
cdef double ARMIJO_SHRINK = 0.5
cdef double MIN_STEP = 1e-20
cdef double GRAD_FLOOR = 1e-30


def min_eig_ascent(double[:, :, ::1] psis, double[:, ::1] x0, int iterations, double step_scale):
    """Projected supergradient ascent of the minimum eigenvalue over the unit ball."""
    cdef Py_ssize_t d = psis.shape[0]
    cdef Py_ssize_t rb = psis.shape[1]
    cdef Py_ssize_t restarts = x0.shape[0]

    a_arr = np.empty((rb, rb), dtype=np.float64)
    w_arr = np.empty(rb, dtype=np.float64)
    cdef int lwork = 10 * <int>rb
    work_arr = np.empty(lwork, dtype=np.float64)
    x_arr = np.empty(d, dtype=np.float64)
    g_arr = np.empty(d, dtype=np.float64)
    best_x_arr = np.array(x0[0], dtype=np.float64, copy=True)

    cdef double[:, ::1] a = a_arr
    cdef double[::1] w = w_arr
    cdef double[::1] work = work_arr
    cdef double[::1] x = x_arr
    cdef double[::1] g = g_arr
    cdef double[::1] best_x = best_x_arr

    cdef double best = -INFINITY
    cdef int best_restart = 0
    cdef int n_int = <int>rb
    cdef int lda = <int>rb
    cdef int info = 0
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef Py_ssize_t rst, t, i, j, k
    cdef double lam, step, nrm2, acc, ui

    with nogil:
        for rst in range(restarts):
            for k in range(d):
                x[k] = x0[rst, k]
            for t in range(1, iterations + 1):
                for i in range(rb):
                    for j in range(rb):
                        acc = 0.0
                        for k in range(d):
                            acc += x[k] * psis[k, i, j]
                        a[i, j] = acc
                dsyev(&jobz, &uplo, &n_int, &a[0, 0], &lda, &w[0], &work[0], &lwork, &info)
                if info != 0:
                    break
                lam = w[0]
                if lam > best:
                    best = lam
                    best_restart = <int>rst
                    for k in range(d):
                        best_x[k] = x[k]
                # LAPACK stores eigenvectors column-major, so the eigenvector
                # of w[0] occupies row 0 of this C-ordered buffer.
                for k in range(d):
                    acc = 0.0
                    for i in range(rb):
                        ui = a[0, i]
                        for j in range(rb):
                            acc += ui * psis[k, i, j] * a[0, j]
                    g[k] = acc
                step = step_scale / sqrt(<double>t)
                nrm2 = 0.0
                for k in range(d):
                    x[k] += step * g[k]
                    nrm2 += x[k] * x[k]
                if nrm2 > 1.0:
                    acc = sqrt(nrm2)
                    for k in range(d):
                        x[k] /= acc
    return float(best), best_x_arr, int(best_restart)


cdef double _objective(double[:, ::1] q, cnp.int64_t[:, ::1] edges, double[::1] d2) nogil:
    cdef Py_ssize_t m = edges.shape[0]
    cdef Py_ssize_t s_dim = q.shape[1]
    cdef Py_ssize_t e, i, j, k
    cdef double f = 0.0
    cdef double res, diffk
    for e in range(m):
        i = <Py_ssize_t>edges[e, 0]
        j = <Py_ssize_t>edges[e, 1]
        res = -d2[e]
        for k in range(s_dim):
            diffk = q[i, k] - q[j, k]
            res += diffk * diffk
        f += res * res
    return f


def edge_descent(double[:, ::1] q0, cnp.int64_t[:, ::1] edges, double[::1] d2, int max_iters, double f_tol):
    """Gradient descent with backtracking on the squared-length edge residuals."""
    cdef Py_ssize_t n = q0.shape[0]
    cdef Py_ssize_t s_dim = q0.shape[1]
    cdef Py_ssize_t m = edges.shape[0]

    q_arr = np.array(q0, dtype=np.float64, copy=True)
    trial_arr = np.empty((n, s_dim), dtype=np.float64)
    grad_arr = np.empty((n, s_dim), dtype=np.float64)
    cdef double[:, ::1] q = q_arr
    cdef double[:, ::1] trial = trial_arr
    cdef double[:, ::1] grad = grad_arr

    cdef double f, tf, gn2, alpha, res, diffk
    cdef Py_ssize_t e, i, j, k, t
    cdef int used = 0
    cdef bint accepted

    f = _objective(q, edges, d2)
    with nogil:
        for t in range(1, max_iters + 1):
            used = <int>t
            if f <= f_tol:
                break
            for i in range(n):
                for k in range(s_dim):
                    grad[i, k] = 0.0
            for e in range(m):
                i = <Py_ssize_t>edges[e, 0]
                j = <Py_ssize_t>edges[e, 1]
                res = -d2[e]
                for k in range(s_dim):
                    diffk = q[i, k] - q[j, k]
                    res += diffk * diffk
                res *= 4.0
                for k in range(s_dim):
                    diffk = q[i, k] - q[j, k]
                    grad[i, k] += res * diffk
                    grad[j, k] -= res * diffk
            gn2 = 0.0
            for i in range(n):
                for k in range(s_dim):
                    gn2 += grad[i, k] * grad[i, k]
            if gn2 <= GRAD_FLOOR:
                break
            alpha = 1.0
            accepted = False
            while alpha >= MIN_STEP:
                for i in range(n):
                    for k in range(s_dim):
                        trial[i, k] = q[i, k] - alpha * grad[i, k]
                tf = _objective(trial, edges, d2)
                if tf <= f - ARMIJO_SLOPE * alpha * gn2:
                    for i in range(n):
                        for k in range(s_dim):
                            q[i, k] = trial[i, k]
                    f = tf
                    accepted = True
                    break
                alpha *= ARMIJO_SHRINK
            if not accepted:
                break
    return q_arr, float(f), int(used)
