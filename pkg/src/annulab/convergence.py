"""Grid-refinement studies against closed-form values.

A study evaluates one residual on a sequence of grids and fits the observed
order ``p = log(e_i / e_{i+1}) / log(h_i / h_{i+1})`` with
``h = sqrt(ds^2 + dtheta^2)``.  Residuals that stay at round-off on every grid
are reported as exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from annulab.frames import GaugeAngle, canonical_frame, frame_k, frame_metrics, gauge_rotate
from annulab.grid import AnnulusGrid, integrate, make_grid
from annulab.surfaces import default_grid, gauss_map, resolve_params, sample_catalog
from annulab.theorems import WINDINGS, random_gauge

MIN_ORDER = 1.9
EXACT_LEVEL = 1e-12


def closed_form(name: str, params: dict, grid: AnnulusGrid) -> dict:
    """Exact integrals for a catalog surface on the grid's annulus.

    Keys: ``gauss_energy`` (= int |A|^2 dmu), ``gamma`` (= int |K| dmu) and,
    where known, ``E`` and ``F`` of the canonical frame.
    """
    p = resolve_params(name, params)
    b, a = grid.b, grid.a
    L = math.log(a / b)
    if name == "flat":
        return {"gauss_energy": 0.0, "gamma": 0.0, "E": 4 * math.pi * L, "F": 2 * math.pi * L}
    if name == "log_cylinder":
        return {"gauss_energy": 0.0, "gamma": 0.0, "E": 0.0, "F": 0.0}
    if name == "catenoid":
        t = math.tanh(math.log(a)) - math.tanh(math.log(b))
        return {
            "gauss_energy": 4 * math.pi * t,
            "gamma": 2 * math.pi * t,
            "E": 4 * math.pi * L,
            # int tanh^2 s ds d theta
            "F": 2 * math.pi * (L - t),
        }
    if name == "enneper":
        g = 4 * math.pi * (1 / (1 + b * b) - 1 / (1 + a * a))
        return {"gauss_energy": 2 * g, "gamma": g}
    raise KeyError(name)


def _gauge_deviation(imm, seed: int) -> float:
    grid = imm.grid
    frame = canonical_frame(imm)
    K0 = frame_k(frame)
    if imm.name == "flat":
        # pure winding rotations of the flat frame stay functions of theta alone,
        # where the Jacobian pairing vanishes identically
        gauges = [GaugeAngle(0.0, k) for k in WINDINGS[1:]]
    else:
        rng = np.random.default_rng(seed)
        gauges = [GaugeAngle(random_gauge(grid, rng), WINDINGS[i % len(WINDINGS)])
                  for i in range(5)]
    return max(float(np.abs(frame_k(gauge_rotate(frame, g)) - K0).max()) for g in gauges)


def _residual(study: str, name: str, params: dict, grid: AnnulusGrid, seed: int) -> float:
    imm = sample_catalog(name, grid, params)
    exact = closed_form(name, params, grid)
    if study == "appendix-3.4":
        return abs(integrate(grid, gauss_map(imm).energy_density) - exact["gauss_energy"])
    if study == "gauge-invariance":
        return _gauge_deviation(imm, seed)
    m = frame_metrics(None, canonical_frame(imm))
    if study == "thm12-gamma":
        return abs(m.gamma - exact["gamma"])
    if study == "frame-energy":
        if "E" not in exact:
            raise KeyError(f"no closed-form frame energy for {name}")
        return abs(m.E - exact["E"])
    raise KeyError(study)


STUDIES = ("appendix-3.4", "gauge-invariance", "thm12-gamma", "frame-energy")


@dataclass(frozen=True)
class ConvergenceRow:
    grid: str
    h: float
    residual: float
    order: float  # NaN on the first grid

    def as_row(self) -> list:
        return [self.grid, self.h, self.residual, self.order]


@dataclass(frozen=True)
class ConvergenceResult:
    study: str
    surface: str
    rows: tuple

    @property
    def exact(self) -> bool:
        return all(r.residual < EXACT_LEVEL for r in self.rows)

    @property
    def min_order(self) -> float:
        orders = [r.order for r in self.rows[1:]]
        return min(orders) if orders else math.nan

    @property
    def passed(self) -> bool:
        return self.exact or self.min_order >= MIN_ORDER

    def order_label(self) -> str:
        return "exact" if self.exact else f"{self.min_order:.4f}"


COLUMNS = ["grid", "h", "residual", "order"]


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n_s, n_t = (int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise ValueError(f"grid must look like 128x256, got {text!r}") from exc
    return n_s, n_t


def convergence_study(study: str, surface: str, params: dict | None, grids,
                      domain: tuple[float, float] | None = None,
                      seed: int = 0) -> ConvergenceResult:
    """Run ``study`` on ``grids`` (list of ``(n_s, n_theta)``), coarsest first."""
    if study not in STUDIES:
        raise KeyError(study)
    params = dict(params or {})
    if len(grids) < 3:
        raise ValueError("a convergence study needs at least three grids")
    rows = []
    prev = None
    for n_s, n_t in grids:
        if domain is None:
            grid = default_grid(surface, params, n_s, n_t)
        else:
            grid = make_grid(domain[0], domain[1], n_s, n_t)
        h = math.sqrt(grid.ds**2 + grid.dtheta**2)
        res = _residual(study, surface, params, grid, seed)
        order = math.nan
        if prev is not None and res > 0 and prev[1] > 0:
            order = math.log(prev[1] / res) / math.log(prev[0] / h)
        rows.append(ConvergenceRow(grid.label(), h, res, order))
        prev = (h, res)
    return ConvergenceResult(study, surface, tuple(rows))
