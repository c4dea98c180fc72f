"""Backend selection for the banded solvers.

The compiled extension is used when it was built; otherwise, or when
``ANNULAB_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""

from __future__ import annotations

import os

from annulab import _fallback

if os.environ.get("ANNULAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from annulab import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "numpy"

solve_tridiagonal = _impl.solve_tridiagonal
solve_pentadiagonal = _impl.solve_pentadiagonal


def backends() -> dict:
    """All importable implementations keyed by name."""
    out = {"numpy": _fallback}
    try:
        from annulab import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
