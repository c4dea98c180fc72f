"""Linear elliptic solvers on the annulus.

In ``(s, theta)`` the Laplacian is ``exp(-2s)(d_ss + d_theta_theta)``, so a
discrete Fourier transform in theta decouples every solve into independent
banded systems in s, one per mode.  The batched banded eliminations live in
:mod:`annulab.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from annulab import kernels
from annulab.errors import CompatibilityError, NotClosedError, SolverDivergenceError
from annulab.grid import (
    AnnulusGrid,
    OneForm,
    d_s,
    d_theta,
    d_thetatheta,
    dirichlet_norm,
    grad_norm_sq,
    hodge_star,
    integrate,
    jacobian,
    laplacian,
)

C_INFTY = 1.0 / (2.0 * math.pi)
C_L2 = math.sqrt(3.0 / (64.0 * math.pi))
RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True)
class SolverInfo:
    residual: float
    iterations: int = 1
    compatibility_defect: float = 0.0

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "iterations": self.iterations,
            "compatibility_defect": self.compatibility_defect,
        }


def _mode_eigenvalues(grid: AnnulusGrid) -> np.ndarray:
    """Eigenvalues of ``-d_theta_theta`` (3-point, periodic) per rfft mode."""
    m = np.arange(grid.n_theta // 2 + 1)
    return (2.0 * np.sin(0.5 * m * grid.dtheta) / grid.dtheta) ** 2


def _solve_modes(lower, diag, upper, rhs_hat):
    """Run the tridiagonal kernel on complex right-hand sides, one system per mode."""
    n_modes = diag.shape[0]
    lo = np.ascontiguousarray(np.concatenate([lower, lower]))
    di = np.ascontiguousarray(np.concatenate([diag, diag]))
    up = np.ascontiguousarray(np.concatenate([upper, upper]))
    rr = np.ascontiguousarray(np.concatenate([rhs_hat.real, rhs_hat.imag]))
    x = kernels.solve_tridiagonal(lo, di, up, rr)
    return x[:n_modes] + 1j * x[n_modes:]


def _operator_scale(grid: AnnulusGrid) -> float:
    return math.exp(-2.0 * grid.s_min) * (4.0 / grid.ds**2 + 4.0 / grid.dtheta**2)


def _relative_residual(res: np.ndarray, rhs: np.ndarray, v: np.ndarray, grid) -> float:
    denom = np.abs(rhs).max() + _operator_scale(grid) * np.abs(v).max()
    if denom == 0.0:
        return 0.0
    return float(np.abs(res).max() / denom)


def poisson_dirichlet(grid: AnnulusGrid, rhs, g_a=0.0, g_b=0.0, full_output=False):
    """Solve ``-lap v = rhs`` with ``v = g_a`` on r = a and ``v = g_b`` on r = b.

    ``g_a``/``g_b`` are scalars or arrays of length ``n_theta``.
    """
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), grid.shape)
    g_a = np.broadcast_to(np.asarray(g_a, dtype=float), (grid.n_theta,))
    g_b = np.broadcast_to(np.asarray(g_b, dtype=float), (grid.n_theta,))
    h2 = grid.ds**2
    n_in = grid.n_s - 2

    # h^2 (v_{i-1} - 2 v_i + v_{i+1})/h^2 - h^2 lam v_i = -h^2 exp(2s) rhs
    src = -h2 * np.exp(2.0 * grid.s[1:-1])[:, None] * rhs[1:-1]
    src_hat = np.fft.rfft(src, axis=1).T.copy()  # (modes, n_in)
    ga_hat = np.fft.rfft(g_a)
    gb_hat = np.fft.rfft(g_b)
    src_hat[:, 0] -= gb_hat
    src_hat[:, -1] -= ga_hat

    lam = _mode_eigenvalues(grid)
    n_modes = lam.size
    lower = np.ones((n_modes, n_in))
    upper = np.ones((n_modes, n_in))
    lower[:, 0] = 0.0
    upper[:, -1] = 0.0
    diag = -2.0 - h2 * lam[:, None] * np.ones((1, n_in))
    v_hat = _solve_modes(lower, diag, upper, src_hat)

    v = np.empty(grid.shape)
    v[1:-1] = np.fft.irfft(v_hat.T, n=grid.n_theta, axis=1)
    v[0] = g_b
    v[-1] = g_a

    res = (-laplacian(grid, v) - rhs)[1:-1]
    rel = _relative_residual(res, rhs, v, grid)
    if not np.isfinite(v).all() or rel > RESIDUAL_LIMIT:
        raise SolverDivergenceError(f"Dirichlet solve residual {rel:.3e} above {RESIDUAL_LIMIT}")
    if full_output:
        return v, SolverInfo(residual=rel)
    return v


def compatibility_defect(grid: AnnulusGrid, rhs, flux_a, flux_b) -> float:
    """``int rhs dx - (flux integrals over both circles)`` for ``lap u = rhs``."""
    flux_a = np.broadcast_to(np.asarray(flux_a, dtype=float), (grid.n_theta,))
    flux_b = np.broadcast_to(np.asarray(flux_b, dtype=float), (grid.n_theta,))
    boundary = grid.dtheta * (grid.a * flux_a.sum() + grid.b * flux_b.sum())
    return integrate(grid, rhs) - boundary


def poisson_neumann(
    grid: AnnulusGrid, rhs, flux_a=0.0, flux_b=0.0, full_output=False, max_defect=None
):
    """Mean-zero solution of ``lap u = rhs`` with outward normal derivative ``flux``.

    An incompatible right-hand side is corrected by subtracting its defect
    uniformly over the area; the defect is reported in the ``SolverInfo``.
    When ``max_defect`` is given, a larger defect raises ``CompatibilityError``.
    """
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), grid.shape)
    flux_a = np.broadcast_to(np.asarray(flux_a, dtype=float), (grid.n_theta,))
    flux_b = np.broadcast_to(np.asarray(flux_b, dtype=float), (grid.n_theta,))

    defect = compatibility_defect(grid, rhs, flux_a, flux_b)
    if max_defect is not None and abs(defect) > max_defect:
        raise CompatibilityError(
            f"compatibility defect {defect:.6g} exceeds {max_defect:.3g}", defect
        )
    rhs_c = rhs - defect / grid.area

    h = grid.ds
    n = grid.n_s
    # d_s u on the circles: outward normal is +d_r at r=a and -d_r at r=b
    g_top = grid.a * flux_a
    g_bot = -grid.b * flux_b
    src = h * h * np.exp(2.0 * grid.s)[:, None] * rhs_c
    src[0] += 2.0 * h * g_bot
    src[-1] -= 2.0 * h * g_top
    src_hat = np.fft.rfft(src, axis=1).T.copy()

    lam = _mode_eigenvalues(grid)
    n_modes = lam.size
    lower = np.ones((n_modes, n))
    upper = np.ones((n_modes, n))
    lower[:, 0] = 0.0
    upper[:, -1] = 0.0
    upper[:, 0] = 2.0
    lower[:, -1] = 2.0
    diag = -2.0 - h * h * lam[:, None] * np.ones((1, n))
    # mode 0 is singular (constants); pin its first node
    diag[0, 0] = 1.0
    upper[0, 0] = 0.0
    src_hat[0, 0] = 0.0
    u_hat = _solve_modes(lower, diag, upper, src_hat)
    u = np.fft.irfft(u_hat.T, n=grid.n_theta, axis=1)
    u -= integrate(grid, u) / grid.area

    res = np.empty(grid.shape)
    res[1:-1] = (laplacian(grid, u) - rhs_c)[1:-1]
    ghost_lo = u[1] - 2.0 * h * g_bot
    ghost_hi = u[-2] + 2.0 * h * g_top
    tt = d_thetatheta(grid, u)
    res[0] = (np.exp(-2.0 * grid.s[0]) * ((ghost_lo - 2 * u[0] + u[1]) / h**2 + tt[0])
              - rhs_c[0])
    res[-1] = (np.exp(-2.0 * grid.s[-1]) * ((u[-2] - 2 * u[-1] + ghost_hi) / h**2 + tt[-1])
               - rhs_c[-1])
    rel = _relative_residual(res, rhs_c, u, grid)
    if not np.isfinite(u).all() or rel > RESIDUAL_LIMIT:
        raise SolverDivergenceError(f"Neumann solve residual {rel:.3e} above {RESIDUAL_LIMIT}")
    if full_output:
        return u, SolverInfo(residual=rel, compatibility_defect=defect)
    return u


def harmonic_annulus(grid: AnnulusGrid, c_a: float, c_b: float) -> np.ndarray:
    """Radial harmonic function equal to ``c_a`` on r = a and ``c_b`` on r = b."""
    L = grid.log_ratio
    v = (c_a - c_b) / L * grid.s + (c_b * grid.s_max - c_a * grid.s_min) / L
    return np.repeat(v[:, None], grid.n_theta, axis=1)


# -- Wente problems ------------------------------------------------------------


@dataclass(frozen=True)
class WenteSolution:
    v: np.ndarray
    sup_norm: float
    grad_norm: float
    product: float  # sum_k ||grad a^k|| ||grad b^k||
    bound_infty: float
    bound_l2: float

    @property
    def sup_ratio(self) -> float:
        return self.sup_norm / self.product if self.product > 0 else 0.0

    @property
    def grad_ratio(self) -> float:
        return self.grad_norm / self.product if self.product > 0 else 0.0


def _components(field: np.ndarray) -> np.ndarray:
    f = np.asarray(field, dtype=float)
    return f[..., None] if f.ndim == 2 else f


def wente_solve(grid: AnnulusGrid, a_field, b_field) -> WenteSolution:
    """Solve ``-lap v = sum_k a^k_x b^k_y - a^k_y b^k_x`` with v = 0 on both circles."""
    a = _components(a_field)
    b = _components(b_field)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    rhs = jacobian(grid, a, b).sum(axis=2)
    v = poisson_dirichlet(grid, rhs)
    product = sum(
        dirichlet_norm(grid, a[..., k]) * dirichlet_norm(grid, b[..., k])
        for k in range(a.shape[2])
    )
    return WenteSolution(
        v=v,
        sup_norm=float(np.abs(v).max()),
        grad_norm=dirichlet_norm(grid, v),
        product=product,
        bound_infty=C_INFTY * product,
        bound_l2=C_L2 * product,
    )


def band_limited_field(grid: AnnulusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Evaluate ``sum c[l, m, p] P_l(sigma) trig_p(m theta)`` on the grid.

    ``sigma`` maps [log b, log a] onto [-1, 1]; ``p = 0`` is cosine and
    ``p = 1`` sine.  Grid-independent, so the same field can be sampled
    on refined grids.
    """
    n_leg, n_mode, _ = coeffs.shape
    sigma = 2.0 * (grid.s - grid.s_min) / grid.log_ratio - 1.0
    P = np.polynomial.legendre.legvander(sigma, n_leg - 1)  # (n_s, n_leg)
    m = np.arange(n_mode)[:, None]
    C = np.cos(m * grid.theta[None, :])
    S = np.sin(m * grid.theta[None, :])
    return P @ (coeffs[:, :, 0] @ C + coeffs[:, :, 1] @ S)


def random_band_limited_coeffs(rng: np.random.Generator, n_leg: int, n_mode: int):
    l = np.arange(n_leg)[:, None, None]
    m = np.arange(n_mode)[None, :, None]
    return rng.standard_normal((n_leg, n_mode, 2)) / (1.0 + l + m) ** 2


@dataclass(frozen=True)
class AuditRow:
    sample: int
    seed: int
    sup_ratio: float
    grad_ratio: float
    bound_inf: float
    bound_l2: float

    def as_row(self) -> list:
        return [self.sample, self.seed, self.sup_ratio, self.grad_ratio,
                self.bound_inf, self.bound_l2]


AUDIT_COLUMNS = ["sample", "seed", "sup_ratio", "grad_ratio", "bound_inf", "bound_l2"]


@dataclass(frozen=True)
class WenteAudit:
    rows: list
    tolerance: float
    grid: AnnulusGrid
    coeffs: list = field(repr=False, default_factory=list)

    @property
    def max_sup_ratio(self) -> float:
        return max(r.sup_ratio for r in self.rows)

    @property
    def max_grad_ratio(self) -> float:
        return max(r.grad_ratio for r in self.rows)

    @property
    def worst_sample(self) -> int:
        return max(self.rows, key=lambda r: r.sup_ratio / C_INFTY).sample

    @property
    def passed(self) -> bool:
        return (self.max_sup_ratio <= C_INFTY + self.tolerance
                and self.max_grad_ratio <= C_L2 + self.tolerance)


def audit_sample_coeffs(seed: int, sample: int, grid: AnnulusGrid, n_leg: int = 6):
    n_mode = max(1, min(6, grid.n_theta // 4)) + 1
    rng = np.random.default_rng([seed, sample])
    return (random_band_limited_coeffs(rng, n_leg, n_mode),
            random_band_limited_coeffs(rng, n_leg, n_mode))


def wente_audit(grid: AnnulusGrid, n_samples: int, seed: int, tolerance=None) -> WenteAudit:
    """Measure ``||v||_inf / (||grad a|| ||grad b||)`` and the L^2 analogue on random pairs.

    Sample ``i`` is generated from ``default_rng([seed, i])`` with Legendre
    degree < 6 in s and theta-modes up to ``min(6, n_theta/4)``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    tol = grid.tau if tolerance is None else tolerance
    rows, coeffs = [], []
    for i in range(n_samples):
        ca, cb = audit_sample_coeffs(seed, i, grid)
        sol = wente_solve(grid, band_limited_field(grid, ca), band_limited_field(grid, cb))
        rows.append(AuditRow(i, seed, sol.sup_ratio, sol.grad_ratio, C_INFTY, C_L2))
        coeffs.append((ca, cb))
    return WenteAudit(rows=rows, tolerance=tol, grid=grid, coeffs=coeffs)


# -- Hodge decomposition -------------------------------------------------------


@lru_cache(maxsize=16)
def _ds_normal_matrix(n: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """``D`` (the d_s stencil) and ``D^T W D`` for trapezoid weights ``W``."""
    D = np.zeros((n, n))
    idx = np.arange(1, n - 1)
    D[idx, idx - 1] = -1.0
    D[idx, idx + 1] = 1.0
    D[0, :3] = (-3.0, 4.0, -1.0)
    D[-1, -3:] = (1.0, -4.0, 3.0)
    D /= 2.0 * h
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    N = D.T @ (w[:, None] * D)
    return D, N


def _to_bands(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    bands = np.zeros((5, n))
    for k in range(5):
        off = k - 2
        i = np.arange(max(0, -off), min(n, n - off))
        bands[k, i] = M[i, i + off]
    return bands


def least_squares_potential(eta: OneForm) -> np.ndarray:
    """Discrete minimizer of ``int |dv - eta|^2 dx`` over single-valued v.

    Uses the exact adjoint of the ``differentiate`` stencils, so an exact
    discrete differential ``eta = d v`` is recovered to round-off.  The
    returned v has an arbitrary additive constant.
    """
    grid = eta.grid
    n = grid.n_s
    D, N = _ds_normal_matrix(n, grid.ds)
    w = grid.trapezoid_weights
    # in (s, theta) the energy is sum_w (v_s - eta_s)^2 + (v_t - eta_t)^2
    es_hat = np.fft.rfft(eta.w_s, axis=1)
    et_hat = np.fft.rfft(eta.w_theta, axis=1)
    m = np.arange(grid.n_theta // 2 + 1)
    sigma = np.sin(m * grid.dtheta) / grid.dtheta  # symbol of d_theta is i*sigma
    rhs = D.T @ (w[:, None] * es_hat) - 1j * sigma[None, :] * (w[:, None] * et_hat)

    base = _to_bands(N)
    n_modes = m.size
    bands = np.repeat(base[None], n_modes, axis=0)
    bands[:, 2, :] += sigma[:, None] ** 2 * w[None, :]
    rhs = rhs.T.copy()  # (modes, n)
    for k in np.flatnonzero(np.abs(sigma) < 1e-12):
        # constant-in-s null direction of the singular modes; pin node 0
        bands[k, :, 0] = 0.0
        bands[k, 2, 0] = 1.0
        bands[k, 1, 1] = 0.0
        bands[k, 0, 2] = 0.0
        rhs[k, 0] = 0.0
    bb = np.ascontiguousarray(np.concatenate([bands, bands]))
    rr = np.ascontiguousarray(np.concatenate([rhs.real, rhs.imag]))
    x = kernels.solve_pentadiagonal(bb, rr)
    v_hat = x[:n_modes] + 1j * x[n_modes:]
    v = np.fft.irfft(v_hat.T, n=grid.n_theta, axis=1)
    if not np.isfinite(v).all():
        raise SolverDivergenceError("least-squares potential produced non-finite values")
    return v


@dataclass(frozen=True)
class HodgeParts:
    v: np.ndarray
    alpha: float
    closedness_spread: float
    loop_integrals: np.ndarray = field(repr=False)
    reconstruction_error: float = 0.0

    @property
    def c_a(self) -> float:
        return float(self.v[-1, 0])

    @property
    def c_b(self) -> float:
        return float(self.v[0, 0])


def hodge_decompose(omega: OneForm, tolerance: float | None = None) -> HodgeParts:
    """Split ``*omega = dv + alpha dtheta`` with v single-valued and ``v(a, 0) = 0``.

    ``alpha`` is the mean over s-levels of the loop integrals of ``*omega``
    divided by 2 pi; their standard deviation is the closedness diagnostic.
    """
    grid = omega.grid
    tol = grid.tau if tolerance is None else tolerance
    eta = hodge_star(omega)
    loops = eta.w_theta.sum(axis=1) * grid.dtheta
    spread = float(loops.std())
    if spread > tol * (1.0 + float(np.abs(loops).max())):
        raise NotClosedError(
            f"loop integrals of *omega vary by {spread:.3e} across circles (tolerance {tol:.3e})"
        )
    alpha = float(loops.mean() / (2.0 * math.pi))
    exact = OneForm(grid, eta.w_r, eta.w_theta - alpha)
    v = least_squares_potential(exact)
    v = v - v[-1, 0]

    vs = d_s(grid, v)
    vt = d_theta(grid, v)
    diff = OneForm.from_s_components(grid, vs - exact.w_s, vt - exact.w_theta)
    err = math.sqrt(integrate(grid, diff.norm_sq()))
    ref = math.sqrt(integrate(grid, eta.norm_sq()))
    return HodgeParts(
        v=v,
        alpha=alpha,
        closedness_spread=spread,
        loop_integrals=loops,
        reconstruction_error=err / ref if ref > 0 else err,
    )


def form_from_potential(grid: AnnulusGrid, v: np.ndarray, alpha: float) -> OneForm:
    """The 1-form omega with ``*omega = dv + alpha dtheta`` (discrete dv)."""
    star = OneForm(grid, d_s(grid, v) / grid.R, d_theta(grid, v) + alpha)
    return -hodge_star(star)


def grad_energy(grid: AnnulusGrid, v: np.ndarray) -> float:
    return integrate(grid, grad_norm_sq(grid, v))


__all__ = [
    "AuditRow",
    "AUDIT_COLUMNS",
    "C_INFTY",
    "C_L2",
    "HodgeParts",
    "SolverInfo",
    "WenteAudit",
    "WenteSolution",
    "band_limited_field",
    "compatibility_defect",
    "form_from_potential",
    "grad_energy",
    "harmonic_annulus",
    "hodge_decompose",
    "least_squares_potential",
    "poisson_dirichlet",
    "poisson_neumann",
    "wente_audit",
    "wente_solve",
]
