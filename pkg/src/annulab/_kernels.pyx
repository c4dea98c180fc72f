# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled banded solvers used by the Poisson and Hodge solvers.

Each routine solves a batch of independent systems, one per row of the
coefficient arrays, by Gaussian elimination without pivoting.  Callers
only pass diagonally dominant or symmetric positive definite systems.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def solve_tridiagonal(double[:, ::1] lower, double[:, ::1] diag,
                      double[:, ::1] upper, double[:, ::1] rhs):
    """Solve ``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]``."""
    cdef Py_ssize_t m, i
    cdef Py_ssize_t nb = diag.shape[0]
    cdef Py_ssize_t n = diag.shape[1]
    cdef double denom
    out = np.empty((nb, n), dtype=np.float64)
    cdef double[:, ::1] x = out
    cdef double[::1] cp = np.empty(n, dtype=np.float64)
    cdef double[::1] dp = np.empty(n, dtype=np.float64)

    for m in range(nb):
        cp[0] = upper[m, 0] / diag[m, 0]
        dp[0] = rhs[m, 0] / diag[m, 0]
        for i in range(1, n):
            denom = diag[m, i] - lower[m, i] * cp[i - 1]
            cp[i] = upper[m, i] / denom
            dp[i] = (rhs[m, i] - lower[m, i] * dp[i - 1]) / denom
        x[m, n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[m, i] = dp[i] - cp[i] * x[m, i + 1]
    return out


def solve_pentadiagonal(double[:, :, ::1] bands, double[:, ::1] rhs):
    """Solve banded systems with two sub- and two super-diagonals.

    ``bands[m, k, i]`` holds ``A[i, i + k - 2]`` for ``k = 0..4``.
    """
    cdef Py_ssize_t m, i, k, j
    cdef Py_ssize_t nb = bands.shape[0]
    cdef Py_ssize_t n = bands.shape[2]
    cdef double piv, fac
    out = np.empty((nb, n), dtype=np.float64)
    cdef double[:, ::1] x = out
    cdef double[:, ::1] a = np.empty((5, n), dtype=np.float64)
    cdef double[::1] y = np.empty(n, dtype=np.float64)

    for m in range(nb):
        for k in range(5):
            for i in range(n):
                a[k, i] = bands[m, k, i]
        for i in range(n):
            y[i] = rhs[m, i]
        # forward elimination; row j below pivot i has A[j, i] at band 2 + i - j
        for i in range(n):
            piv = a[2, i]
            for j in range(i + 1, min(i + 3, n)):
                fac = a[2 + i - j, j] / piv
                if fac == 0.0:
                    continue
                # A[j, c] -= fac * A[i, c] for c = i..i+2
                for k in range(0, 3):
                    if i + k < n:
                        a[2 + i + k - j, j] -= fac * a[2 + k, i]
                y[j] -= fac * y[i]
        for i in range(n - 1, -1, -1):
            fac = y[i]
            if i + 1 < n:
                fac -= a[3, i] * x[m, i + 1]
            if i + 2 < n:
                fac -= a[4, i] * x[m, i + 2]
            x[m, i] = fac / a[2, i]
    return out
