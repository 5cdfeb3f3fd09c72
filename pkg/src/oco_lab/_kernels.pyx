# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bregman projection kernel.

Mirrors _kernels_py.project_kkt: inner per-coordinate bisection in the
substituted variable y = u^(p-1) (one pow per evaluation, 64 halvings),
outer bisection on the KKT multiplier, sums taken in decreasing-|z| order
for exact permutation invariance.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()

ENGINE = "compiled"


cdef double _u_root(double a, double rhs, double lam, double kappa, double inv_pm1) noexcept nogil:
    # root of y^kappa + lam*y = rhs on [0, a^(p-1)], returned as u = y^(1/(p-1))
    cdef double lo = 0.0
    cdef double hi = pow(a, 1.0 / inv_pm1)
    cdef double mid
    cdef int i
    if a == 0.0:
        return 0.0
    for i in range(64):
        mid = 0.5 * (lo + hi)
        if pow(mid, kappa) + lam * mid > rhs:
            hi = mid
        else:
            lo = mid
    return pow(0.5 * (lo + hi), inv_pm1)


cdef double _h(double[::1] a, double[::1] rhs, double lam, double p, double r) noexcept nogil:
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0
    cdef double u
    cdef double inv_pm1 = 1.0 / (p - 1.0)
    cdef double kappa = (r - 1.0) / (p - 1.0)
    if r == p:
        # closed-form inner root: u = a / (1+lam)^(1/(p-1))
        u = pow(1.0 + lam, inv_pm1)
        for i in range(n):
            s += pow(a[i] / u, p)
        return s - 1.0
    for i in range(n):
        u = _u_root(a[i], rhs[i], lam, kappa, inv_pm1)
        s += pow(u, p)
    return s - 1.0


def project_kkt(cnp.ndarray[cnp.float64_t, ndim=1] absz, double p, double r,
                double tol, int max_outer):
    """Same contract as the fallback: (u, lam, iters, bracket, converged)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_sorted = np.sort(absz)[::-1].copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rhs_sorted = a_sorted ** (r - 1.0)
    cdef double[::1] av = a_sorted
    cdef double[::1] rv = rhs_sorted
    cdef double lo = 0.0
    cdef double hi = rhs_sorted[0] * absz.shape[0]
    cdef double mid
    cdef int expansions = 0
    cdef int iters = 0
    cdef bint converged

    while _h(av, rv, hi, p, r) >= 0.0:
        hi *= 2.0
        expansions += 1
        if expansions > 200:
            return absz.copy(), hi, 0, np.inf, False
    # keep halving to float exhaustion; tol is the convergence contract
    while iters < max_outer:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _h(av, rv, mid, p, r) >= 0.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    converged = (hi - lo) <= tol * (1.0 if hi < 1.0 else hi)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.empty_like(absz)
    cdef double[::1] uv = u
    cdef double[::1] zv = absz
    cdef Py_ssize_t i, n = absz.shape[0]
    cdef double inv_pm1 = 1.0 / (p - 1.0)
    cdef double kappa = (r - 1.0) / (p - 1.0)
    cdef double scale
    if r == p:
        scale = pow(1.0 + hi, inv_pm1)
        for i in range(n):
            uv[i] = zv[i] / scale
    else:
        for i in range(n):
            uv[i] = _u_root(zv[i], pow(zv[i], r - 1.0), hi, kappa, inv_pm1)
    return u, hi, iters, hi - lo, converged
