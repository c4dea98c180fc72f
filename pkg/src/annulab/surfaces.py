"""Conformal immersions of the annulus and their geometry.

An :class:`Immersion` holds the sampled map ``f`` (shape ``(n_s, n_theta, n)``)
together with its conformal factor ``u``, defined by ``|grad f|^2 = 2 exp(2u)``.
The catalog provides closed-form surfaces with exact ``u``; arbitrary
Weierstrass data can be integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

from annulab.errors import (
    ConfigError,
    DegenerateImmersionError,
    NonvanishingPeriodError,
    PoleOnAnnulusError,
    UnknownSurfaceError,
)
from annulab.grid import (
    AnnulusGrid,
    d_s,
    d_theta,
    differentiate,
    laplacian,
    make_grid,
    second_derivatives,
    symmetric_grid,
)
from annulab.io import write_csv, write_obj

DEFAULT_N_S = 128
DEFAULT_N_THETA = 256
_FLOOR = 1e-280


@dataclass(frozen=True, eq=False)
class Immersion:
    grid: AnnulusGrid
    f: np.ndarray
    u: np.ndarray
    name: str = "custom"
    params: dict = field(default_factory=dict)
    # f(theta + 2 pi) = f(theta) + period, for maps that are not single-valued
    period: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.f.shape[:2] != self.grid.shape or self.f.ndim != 3:
            raise ValueError(f"f has shape {self.f.shape}, grid is {self.grid.shape}")
        if self.u.shape != self.grid.shape:
            raise ValueError(f"u has shape {self.u.shape}, grid is {self.grid.shape}")
        if not (np.isfinite(self.f).all() and np.isfinite(self.u).all()):
            raise DegenerateImmersionError("immersion contains non-finite values")

    @property
    def dim(self) -> int:
        return self.f.shape[2]

    @cached_property
    def first_derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        """``(f_s, f_theta)``."""
        return differentiate(self.grid, self.f, self.period)

    @cached_property
    def f_r(self) -> np.ndarray:
        return self.first_derivatives[0] * np.exp(-self.grid.S)[..., None]

    @cached_property
    def f_theta(self) -> np.ndarray:
        return self.first_derivatives[1]

    @cached_property
    def second_derivatives(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(f_rr, f_rtheta, f_thetatheta)`` in polar coordinates."""
        f_ss, f_st, f_tt = second_derivatives(self.grid, self.f, self.period)
        f_s = self.first_derivatives[0]
        e1 = np.exp(-self.grid.S)[..., None]
        return (e1 * e1 * (f_ss - f_s), e1 * f_st, f_tt)

    @cached_property
    def tangent_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal positively oriented basis close to ``(f_r, f_theta/r)``.

        Symmetric orthonormalization of the two coordinate vectors, so both are
        treated alike and the result is exactly orthonormal for any map.
        """
        return orthonormalize(self.f_r, self.f_theta / self.grid.R[..., None])

    def summary(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "dim": self.dim,
                "grid": self.grid.summary()}


def orthonormalize(v1: np.ndarray, v2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Loewdin orthonormalization ``[v1 v2] G^{-1/2}`` node by node."""
    g11 = np.einsum("...k,...k->...", v1, v1)
    g22 = np.einsum("...k,...k->...", v2, v2)
    g12 = np.einsum("...k,...k->...", v1, v2)
    det = g11 * g22 - g12**2
    if np.any(det <= _FLOOR) or np.any(g11 <= _FLOOR):
        raise DegenerateImmersionError("coordinate vectors are (nearly) parallel or vanish")
    # inverse square root of a 2x2 SPD matrix: (G + sqrt(det) I)^{-1} * sqrt(...)
    sq = np.sqrt(det)
    t = np.sqrt(g11 + g22 + 2.0 * sq)
    # G^{1/2} = (G + sq I)/t; its inverse is (adj)/(sq * t)
    a = (g22 + sq) / (sq * t)
    c = (g11 + sq) / (sq * t)
    b = -g12 / (sq * t)
    e1 = a[..., None] * v1 + b[..., None] * v2
    e2 = b[..., None] * v1 + c[..., None] * v2
    # one Newton-Schulz polish removes the last digits of drift
    for _ in range(1):
        p11 = np.einsum("...k,...k->...", e1, e1)
        p22 = np.einsum("...k,...k->...", e2, e2)
        p12 = np.einsum("...k,...k->...", e1, e2)
        e1, e2 = (
            (1.5 - 0.5 * p11)[..., None] * e1 - (0.5 * p12)[..., None] * e2,
            (1.5 - 0.5 * p22)[..., None] * e2 - (0.5 * p12)[..., None] * e1,
        )
    return e1, e2


# -- catalog -------------------------------------------------------------------


def _pad(comps: list[np.ndarray], dim: int) -> np.ndarray:
    if dim < len(comps):
        raise ConfigError(f"dim={dim} is smaller than the {len(comps)} coordinates needed")
    out = np.zeros(comps[0].shape + (dim,))
    for k, c in enumerate(comps):
        out[..., k] = c
    return out


def _flat(grid: AnnulusGrid, dim: int) -> Immersion:
    f = _pad([grid.X, grid.Y], dim)
    return Immersion(grid, f, np.zeros(grid.shape), "flat", {"dim": dim})


def _log_cylinder(grid: AnnulusGrid, dim: int, c: float = 0.0) -> Immersion:
    k = math.exp(c)
    f = _pad([k * grid.S, k * grid.TH], dim)
    period = np.zeros(dim)
    period[1] = 2.0 * math.pi * k
    return Immersion(grid, f, c - grid.S, "log_cylinder", {"c": c, "dim": dim}, period)


def _catenoid(grid: AnnulusGrid, dim: int, h: float = 0.5) -> Immersion:
    ch = np.cosh(grid.S)
    f = _pad([ch * np.cos(grid.TH), ch * np.sin(grid.TH), np.array(grid.S)], dim)
    u = np.log(ch) - grid.S
    return Immersion(grid, f, u, "catenoid", {"h": h, "dim": dim})


def _enneper(grid: AnnulusGrid, dim: int) -> Immersion:
    z = grid.X + 1j * grid.Y
    f = _pad(
        [
            np.real(0.5 * (z - z**3 / 3.0)),
            np.real(0.5j * (z + z**3 / 3.0)),
            np.real(0.5 * z**2),
        ],
        dim,
    )
    u = np.log(0.5 * (1.0 + grid.R**2))
    return Immersion(grid, f, u, "enneper", {"dim": dim})


@dataclass(frozen=True)
class CatalogEntry:
    builder: Callable
    defaults: dict
    domain: Callable  # params -> (b, a)
    description: str


CATALOG: dict[str, CatalogEntry] = {
    "flat": CatalogEntry(_flat, {}, lambda p: (1.0, 2.0),
                         "planar annulus f = (x, y, 0), u = 0"),
    "log_cylinder": CatalogEntry(_log_cylinder, {"c": 0.0}, lambda p: (1.0, 2.0),
                                 "flat strip f = e^c (log r, theta, 0), u = c - log r"),
    "catenoid": CatalogEntry(_catenoid, {"h": 0.5},
                             lambda p: (math.exp(-p["h"]), math.exp(p["h"])),
                             "f = (cosh s cos t, cosh s sin t, s), u = log cosh s - s"),
    "enneper": CatalogEntry(_enneper, {}, lambda p: (0.5, 1.0),
                            "Weierstrass g = z, dh = z dz, e^u = (1 + r^2)/2"),
}


def resolve_params(name: str, params: dict | None = None) -> dict:
    """Merge user parameters over the catalog defaults and validate them."""
    if name not in CATALOG:
        raise UnknownSurfaceError(f"unknown surface: {name}")
    entry = CATALOG[name]
    merged = dict(entry.defaults)
    merged["dim"] = 3
    for key, value in (params or {}).items():
        if key not in merged:
            raise ConfigError(
                f"unknown parameter {key!r} for surface {name}; "
                f"expected one of {sorted(merged)}"
            )
        try:
            value = int(value) if key == "dim" else float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"parameter {key}={value!r} is not a number") from exc
        if not math.isfinite(value):
            raise ConfigError(f"parameter {key}={value!r} is not finite")
        merged[key] = value
    if merged["dim"] < 3:
        raise ConfigError(f"ambient dimension must be >= 3, got {merged['dim']}")
    if name == "catenoid" and merged["h"] <= 0:
        raise ConfigError(f"catenoid half-width h must be positive, got {merged['h']}")
    return merged


def default_grid(name: str, params: dict | None = None, n_s: int = DEFAULT_N_S,
                 n_theta: int = DEFAULT_N_THETA) -> AnnulusGrid:
    p = resolve_params(name, params)
    if name == "catenoid":
        return symmetric_grid(p["h"], n_s, n_theta)
    b, a = CATALOG[name].domain(p)
    return make_grid(b, a, n_s, n_theta)


def sample_catalog(name: str, grid: AnnulusGrid | None = None, params: dict | None = None) -> Immersion:
    """Sample a catalog surface with its exact conformal factor.

    Without ``grid`` the surface's default domain at 128x256 is used.
    """
    p = resolve_params(name, params)
    if grid is None:
        grid = default_grid(name, p)
    kwargs = {k: v for k, v in p.items() if k != "dim"}
    return CATALOG[name].builder(grid, p["dim"], **kwargs)


def sample_map(grid: AnnulusGrid, func: Callable, name: str = "custom",
               period=None) -> Immersion:
    """Sample ``func(x, y) -> sequence of coordinate arrays`` on the grid.

    The conformal factor is recomputed from finite differences.
    """
    comps = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape) for c in func(grid.X, grid.Y)]
    f = _pad(comps, max(3, len(comps)))
    per = None if period is None else np.asarray(period, dtype=float)
    provisional = Immersion(grid, f, np.zeros(grid.shape), name, {}, per)
    u, _ = conformal_data(provisional)
    return Immersion(grid, f, u, name, {}, per)


# -- Weierstrass data ----------------------------------------------------------


def _laurent(coeffs: dict, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for k, c in coeffs.items():
        out = out + complex(c) * z ** int(k)
    return out


@dataclass(frozen=True)
class WeierstrassData:
    """Laurent data ``g(z) = sum g_k z^k`` and ``dh = (sum d_k z^k) dz``."""

    g_coeffs: dict
    dh_coeffs: dict
    scale: float = 1.0

    def g(self, z):
        return _laurent(self.g_coeffs, z)

    def dh(self, z):
        return _laurent(self.dh_coeffs, z)

    def phi(self, z) -> np.ndarray:
        """The holomorphic vector ``Phi`` with ``f = scale * Re int Phi dz``; last axis 3."""
        g = self.g(z)
        hp = self.dh(z)
        return self.scale * np.stack(
            [0.5 * (1.0 / g - g) * hp, 0.5j * (1.0 / g + g) * hp, hp], axis=-1
        )

    def conformal_factor(self, z) -> np.ndarray:
        g = np.abs(self.g(z))
        hp = np.abs(self.dh(z))
        return np.log(abs(self.scale) * hp * (1.0 + g**2) / (2.0 * g))

    def to_dict(self) -> dict:
        enc = lambda d: {str(k): [complex(v).real, complex(v).imag] for k, v in d.items()}
        return {"g": enc(self.g_coeffs), "dh": enc(self.dh_coeffs), "scale": self.scale}


CATENOID_DATA = WeierstrassData({1: 1.0}, {-1: 1.0})
HELICOID_DATA = WeierstrassData({1: 1.0}, {-1: 1j})
ENNEPER_DATA = WeierstrassData({1: 1.0}, {1: 1.0})


def real_periods(data: WeierstrassData, grid: AnnulusGrid) -> np.ndarray:
    """``Re of the loop integral of Phi`` on every s-level; shape ``(n_s, 3)``.

    Periodic rectangle rule, spectrally accurate for these integrands.
    """
    z = grid.X + 1j * grid.Y
    integrand = data.phi(z) * (1j * z)[..., None]
    return np.real(integrand.sum(axis=1)) * grid.dtheta


def _check_data(data: WeierstrassData, grid: AnnulusGrid) -> None:
    fine = make_grid(grid.b, grid.a, 4 * (grid.n_s - 1) + 1, 4 * grid.n_theta)
    z = fine.X + 1j * fine.Y
    g = np.abs(data.g(z))
    if not np.isfinite(g).all() or g.min() <= 1e-12 * max(1.0, g.max()):
        raise PoleOnAnnulusError("g has a zero or pole on the closed annulus")
    hp = np.abs(data.dh(z))
    if not np.isfinite(hp).all() or hp.min() <= 1e-12 * max(1.0, hp.max()):
        raise DegenerateImmersionError("dh vanishes on the annulus (branch point)")


def weierstrass_generate(data: WeierstrassData, grid: AnnulusGrid, ray_index: int = 0,
                         period_tol: float | None = None) -> Immersion:
    """Integrate Weierstrass data from the base point ``(log b, 0)``.

    ``f`` is accumulated by the trapezoid rule along the inner circle up to
    ``theta_ray``, out along that ray, and then around each circle.  Different
    ``ray_index`` values give homotopic paths.  Real periods above
    ``period_tol`` (default tau) raise ``NonvanishingPeriodError``.
    """
    _check_data(data, grid)
    periods_by_level = real_periods(data, grid)
    periods = periods_by_level.mean(axis=0)
    tol = grid.tau if period_tol is None else period_tol
    if np.abs(periods).max() > tol:
        raise NonvanishingPeriodError(
            "real periods do not vanish: " + ", ".join(f"{p:.6g}" for p in periods),
            periods,
        )
    j0 = ray_index % grid.n_theta
    z = grid.X + 1j * grid.Y
    phi = data.phi(z)
    dphi_theta = phi * (1j * z)[..., None]  # dz = i z dtheta
    # inner circle from theta = 0 to the chosen ray, then out along it (dz = z ds)
    inner = dphi_theta[0, : j0 + 1]
    start = 0.5 * grid.dtheta * (inner[1:] + inner[:-1]).sum(axis=0)
    ray = phi[:, j0] * z[:, j0, None]
    steps = 0.5 * grid.ds * (ray[1:] + ray[:-1])
    base = start + np.concatenate([np.zeros((1, 3)), np.cumsum(steps, axis=0)])
    # then around each circle starting at column j0
    order = (j0 + np.arange(grid.n_theta)) % grid.n_theta
    circ = dphi_theta[:, order]
    arcs = 0.5 * grid.dtheta * (circ[:, 1:] + circ[:, :-1])
    acc = np.concatenate([np.zeros((grid.n_s, 1, 3)), np.cumsum(arcs, axis=1)], axis=1)
    F = np.empty((grid.n_s, grid.n_theta, 3), dtype=complex)
    F[:, order] = base[:, None, :] + acc
    f = np.real(F)
    u = data.conformal_factor(z)
    return Immersion(grid, f, u, "weierstrass", {"data": data.to_dict(), "dim": 3})


def rigid_align(f: np.ndarray, ref: np.ndarray) -> tuple[np.ndarray, float]:
    """Best rigid motion (rotation + translation) of ``f`` onto ``ref`` (Kabsch).

    Returns the aligned field and the max pointwise distance after alignment.
    """
    P = f.reshape(-1, f.shape[-1])
    Q = ref.reshape(-1, ref.shape[-1])
    pc, qc = P.mean(axis=0), Q.mean(axis=0)
    H = (P - pc).T @ (Q - qc)
    U, _, Vt = np.linalg.svd(H)
    D = np.eye(H.shape[0])
    D[-1, -1] = np.sign(np.linalg.det(Vt.T @ U.T))
    Rm = Vt.T @ D @ U.T
    aligned = ((P - pc) @ Rm.T + qc).reshape(f.shape)
    return aligned, float(np.linalg.norm(aligned - ref, axis=-1).max())


# -- geometry ------------------------------------------------------------------


def metric_density(imm: Immersion) -> np.ndarray:
    """``|grad f|^2 / 2``, equal to ``exp(2u)`` for conformal maps."""
    fr2 = np.einsum("...k,...k->...", imm.f_r, imm.f_r)
    ft2 = np.einsum("...k,...k->...", imm.f_theta, imm.f_theta) / imm.grid.R**2
    return 0.5 * (fr2 + ft2)


def conformal_data(imm: Immersion) -> tuple[np.ndarray, float]:
    """Finite-difference conformal factor and the max normalized conformality defect."""
    fr2 = np.einsum("...k,...k->...", imm.f_r, imm.f_r)
    ft2 = np.einsum("...k,...k->...", imm.f_theta, imm.f_theta) / imm.grid.R**2
    cross = np.einsum("...k,...k->...", imm.f_r, imm.f_theta) / imm.grid.R
    e2u = 0.5 * (fr2 + ft2)
    if np.any(e2u < 1e-14 * max(1.0, float(e2u.max()))):
        raise DegenerateImmersionError("|grad f| vanishes on the grid")
    residual = np.maximum(np.abs(fr2 - ft2), np.abs(cross)) / e2u
    return 0.5 * np.log(e2u), float(residual.max())


class SecondFundamentalForm(NamedTuple):
    A_rr: np.ndarray
    A_rtheta: np.ndarray
    A_thetatheta: np.ndarray
    norm_sq: np.ndarray
    K_gauss: np.ndarray

    def normal_defect(self, imm: Immersion) -> float:
        """Largest tangential component of A relative to ``|A| e^u``."""
        t1, t2 = imm.tangent_basis
        worst = 0.0
        for comp in (self.A_rr, self.A_rtheta, self.A_thetatheta):
            tang = np.hypot(np.einsum("...k,...k->...", comp, t1),
                            np.einsum("...k,...k->...", comp, t2))
            worst = max(worst, float(tang.max()))
        return worst


class FundamentalForms(NamedTuple):
    A: SecondFundamentalForm
    K: np.ndarray  # Liouville: -exp(-2u) lap u
    H: np.ndarray  # exp(-2u) lap f


def _project_normal(v: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    c1 = np.einsum("...k,...k->...", v, t1)[..., None]
    c2 = np.einsum("...k,...k->...", v, t2)[..., None]
    return v - c1 * t1 - c2 * t2


def fundamental_forms(imm: Immersion) -> FundamentalForms:
    grid = imm.grid
    t1, t2 = imm.tangent_basis
    f_rr, f_rt, f_tt = imm.second_derivatives
    A_rr = _project_normal(f_rr, t1, t2)
    A_rt = _project_normal(f_rt, t1, t2)
    A_tt = _project_normal(f_tt, t1, t2)
    r2 = grid.R**2
    sq = lambda v: np.einsum("...k,...k->...", v, v)
    e4u = np.exp(4.0 * imm.u)
    norm_sq = (sq(A_rr) + 2.0 * sq(A_rt) / r2 + sq(A_tt) / r2**2) / e4u
    K_gauss = (np.einsum("...k,...k->...", A_rr, A_tt) - sq(A_rt)) / (e4u * r2)
    K = -np.exp(-2.0 * imm.u) * laplacian(grid, imm.u)
    H = np.exp(-2.0 * imm.u)[..., None] * laplacian(grid, imm.f, imm.period)
    return FundamentalForms(SecondFundamentalForm(A_rr, A_rt, A_tt, norm_sq, K_gauss), K, H)


def area_element(imm: Immersion) -> np.ndarray:
    """``exp(2u)``: the density of d(mu) against dx."""
    return np.exp(2.0 * imm.u)


def plucker(e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """``e1 ^ e2`` in lexicographic (i < j) coordinates of Lambda^2."""
    n = e1.shape[-1]
    i, j = np.triu_indices(n, k=1)
    return e1[..., i] * e2[..., j] - e1[..., j] * e2[..., i]


class GaussMapField(NamedTuple):
    X: np.ndarray
    energy_density: np.ndarray
    curvature_density: np.ndarray  # K exp(2u), the value of the Jacobian pairing


def gauss_map(imm: Immersion, forms: FundamentalForms | None = None) -> GaussMapField:
    grid = imm.grid
    t1, t2 = imm.tangent_basis
    X = plucker(t1, t2)
    Xs, Xt = d_s(grid, X), d_theta(grid, X)
    energy = np.exp(-2.0 * grid.S) * ((Xs**2).sum(axis=-1) + (Xt**2).sum(axis=-1))
    forms = forms if forms is not None else fundamental_forms(imm)
    return GaussMapField(X, energy, forms.K * np.exp(2.0 * imm.u))


def minimality_residual(imm: Immersion) -> float:
    """Max over interior nodes of ``|lap f| exp(-2u)`` (= |H|)."""
    lap = laplacian(imm.grid, imm.f, imm.period)
    val = np.linalg.norm(lap, axis=-1) * np.exp(-2.0 * imm.u)
    return float(val[1:-1].max())


# -- export --------------------------------------------------------------------


def write_point_cloud(path, imm: Immersion) -> None:
    grid = imm.grid
    header = ["s", "theta"] + [f"x{k + 1}" for k in range(imm.dim)]
    table = np.column_stack([grid.S.ravel(), grid.TH.ravel(), imm.f.reshape(-1, imm.dim)])
    write_csv(path, header, table.tolist())


def write_mesh(path, imm: Immersion) -> None:
    wrap = imm.period is None or not np.any(imm.period)
    write_obj(path, imm.f, wrap_theta=wrap, comment=f"{imm.name} {imm.grid.label()}")
