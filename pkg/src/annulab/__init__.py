"""Coulomb moving frames on conformally immersed annuli.

Finite-difference solvers on log-polar annulus grids, a catalog of minimal
annuli, moving-frame energies and executable checks of the energy estimates.
"""

from __future__ import annotations

__version__ = "0.1.0"

from annulab.errors import (  # noqa: E402
    AnnulabError,
    ComputationError,
    ConfigError,
)
from annulab.grid import AnnulusGrid, OneForm, make_grid  # noqa: E402
from annulab.kernels import BACKEND  # noqa: E402
from annulab.surfaces import Immersion, sample_catalog  # noqa: E402
from annulab.frames import Frame, canonical_frame, frame_metrics  # noqa: E402
from annulab.theorems import CHECKS, CheckReport, run_check  # noqa: E402

__all__ = [
    "AnnulabError",
    "AnnulusGrid",
    "BACKEND",
    "CHECKS",
    "CheckReport",
    "ComputationError",
    "ConfigError",
    "Frame",
    "Immersion",
    "OneForm",
    "__version__",
    "canonical_frame",
    "frame_metrics",
    "make_grid",
    "run_check",
    "sample_catalog",
]
