"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and results; the recurrences run in Python over the
system length, vectorized across the batch.
"""

from __future__ import annotations

import numpy as np


def solve_tridiagonal(lower, diag, upper, rhs):
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    nb, n = diag.shape
    cp = np.empty((nb, n))
    dp = np.empty((nb, n))
    cp[:, 0] = upper[:, 0] / diag[:, 0]
    dp[:, 0] = rhs[:, 0] / diag[:, 0]
    for i in range(1, n):
        denom = diag[:, i] - lower[:, i] * cp[:, i - 1]
        cp[:, i] = upper[:, i] / denom
        dp[:, i] = (rhs[:, i] - lower[:, i] * dp[:, i - 1]) / denom
    x = np.empty((nb, n))
    x[:, -1] = dp[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[:, i] * x[:, i + 1]
    return x


def solve_pentadiagonal(bands, rhs):
    a = np.array(bands, dtype=float)
    y = np.array(rhs, dtype=float)
    nb, _, n = a.shape
    for i in range(n):
        piv = a[:, 2, i]
        for j in range(i + 1, min(i + 3, n)):
            fac = a[:, 2 + i - j, j] / piv
            for k in range(3):
                if i + k < n:
                    a[:, 2 + i + k - j, j] -= fac * a[:, 2 + k, i]
            y[:, j] -= fac * y[:, i]
    x = np.empty((nb, n))
    for i in range(n - 1, -1, -1):
        acc = y[:, i].copy()
        if i + 1 < n:
            acc -= a[:, 3, i] * x[:, i + 1]
        if i + 2 < n:
            acc -= a[:, 4, i] * x[:, i + 2]
        x[:, i] = acc / a[:, 2, i]
    return x
