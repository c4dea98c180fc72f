"""Log-polar grid on the annulus b < |x| < a and the discrete calculus on it.

Fields are plain numpy arrays indexed ``[i_s, j_theta]`` (scalar) or
``[i_s, j_theta, k]`` (R^n-valued).  Node ``i`` sits at ``s = log b + i*ds``
with both boundary circles stored; ``theta`` is periodic with ``n_theta``
nodes on ``[0, 2*pi)``.

Every first derivative uses centered second-order differences, with
one-sided second-order stencils on the two boundary rows in ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from annulab.errors import (
    InvalidDomainError,
    InvalidResolutionError,
    LevelOutOfRangeError,
)
from annulab.io import atomic_write

TAU_FACTOR = 50.0


@dataclass(frozen=True)
class AnnulusGrid:
    b: float
    a: float
    n_s: int
    n_theta: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.b) and math.isfinite(self.a)):
            raise InvalidDomainError("radii must be finite")
        if self.b <= 0 or self.a <= self.b:
            raise InvalidDomainError(
                f"need a > b > 0, got b={self.b!r}, a={self.a!r}"
            )
        if self.n_s < 8 or self.n_theta < 8 or self.n_theta % 2:
            raise InvalidResolutionError(
                f"need n_s >= 8 and even n_theta >= 8, got {self.n_s}x{self.n_theta}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_s, self.n_theta)

    @property
    def s_min(self) -> float:
        return math.log(self.b)

    @property
    def s_max(self) -> float:
        return math.log(self.a)

    @property
    def log_ratio(self) -> float:
        """log(a/b), the conformal modulus of the annulus up to 2*pi."""
        return self.s_max - self.s_min

    @property
    def ds(self) -> float:
        return self.log_ratio / (self.n_s - 1)

    @property
    def dtheta(self) -> float:
        return 2.0 * math.pi / self.n_theta

    @property
    def tau(self) -> float:
        """Default verification tolerance 50*(ds^2 + dtheta^2)."""
        return TAU_FACTOR * (self.ds**2 + self.dtheta**2)

    @cached_property
    def s(self) -> np.ndarray:
        return self.s_min + self.ds * np.arange(self.n_s)

    @cached_property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n_theta)

    @cached_property
    def r(self) -> np.ndarray:
        return np.exp(self.s)

    @cached_property
    def S(self) -> np.ndarray:
        return np.broadcast_to(self.s[:, None], self.shape)

    @cached_property
    def TH(self) -> np.ndarray:
        return np.broadcast_to(self.theta[None, :], self.shape)

    @cached_property
    def R(self) -> np.ndarray:
        return np.broadcast_to(self.r[:, None], self.shape)

    @cached_property
    def X(self) -> np.ndarray:
        return self.R * np.cos(self.TH)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.R * np.sin(self.TH)

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n_s, self.ds)
        w[0] = w[-1] = 0.5 * self.ds
        return w

    @cached_property
    def area(self) -> float:
        return integrate(self, np.ones(self.shape))

    def summary(self) -> dict:
        return {"b": self.b, "a": self.a, "n_s": self.n_s, "n_theta": self.n_theta}

    def label(self) -> str:
        return f"{self.n_s}x{self.n_theta}"

    def refined(self, factor: int = 2) -> "AnnulusGrid":
        """Same annulus with ``factor`` times the spacing resolution."""
        return AnnulusGrid(
            self.b, self.a, factor * (self.n_s - 1) + 1, factor * self.n_theta
        )


def make_grid(b: float, a: float, n_s: int, n_theta: int) -> AnnulusGrid:
    return AnnulusGrid(float(b), float(a), int(n_s), int(n_theta))


def symmetric_grid(h: float, n_s: int, n_theta: int) -> AnnulusGrid:
    """Annulus exp(-h) < r < exp(h), symmetric in s."""
    return make_grid(math.exp(-h), math.exp(h), n_s, n_theta)


@dataclass(frozen=True)
class OneForm:
    """``w_r dr + w_theta dtheta`` sampled on the grid."""

    grid: AnnulusGrid
    w_r: np.ndarray
    w_theta: np.ndarray

    @property
    def w_s(self) -> np.ndarray:
        """Coefficient of ds, i.e. ``r * w_r``."""
        return self.grid.R * self.w_r

    def norm_sq(self) -> np.ndarray:
        """Pointwise |w|^2 = w_r^2 + r^-2 w_theta^2."""
        return self.w_r**2 + self.w_theta**2 / self.grid.R**2

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.grid, self.w_r + other.w_r, self.w_theta + other.w_theta)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.grid, self.w_r - other.w_r, self.w_theta - other.w_theta)

    def __mul__(self, c: float) -> "OneForm":
        return OneForm(self.grid, c * self.w_r, c * self.w_theta)

    __rmul__ = __mul__

    def __neg__(self) -> "OneForm":
        return OneForm(self.grid, -self.w_r, -self.w_theta)

    @classmethod
    def from_s_components(cls, grid, w_s, w_theta) -> "OneForm":
        return cls(grid, np.asarray(w_s) / grid.R, np.asarray(w_theta))


def _bcast(grid: AnnulusGrid, field: np.ndarray, radial: np.ndarray) -> np.ndarray:
    """Reshape a per-row quantity so it broadcasts against ``field``."""
    return radial.reshape((grid.n_s,) + (1,) * (field.ndim - 1))


def _theta_neighbours(field: np.ndarray, period) -> tuple[np.ndarray, np.ndarray]:
    fp = np.roll(field, -1, axis=1)
    fm = np.roll(field, 1, axis=1)
    if period is not None:
        # field(theta + 2*pi) = field(theta) + period
        fp[:, -1] += period
        fm[:, 0] -= period
    return fp, fm


def d_s(grid: AnnulusGrid, field: np.ndarray) -> np.ndarray:
    f = np.asarray(field, dtype=float)
    out = np.empty_like(f)
    h2 = 2.0 * grid.ds
    out[1:-1] = (f[2:] - f[:-2]) / h2
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / h2
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / h2
    return out


def d_theta(grid: AnnulusGrid, field: np.ndarray, period=None) -> np.ndarray:
    fp, fm = _theta_neighbours(np.asarray(field, dtype=float), period)
    return (fp - fm) / (2.0 * grid.dtheta)


def differentiate(grid: AnnulusGrid, field: np.ndarray, period=None):
    """Return ``(d_s field, d_theta field)``.

    ``period`` is the jump ``field(theta + 2 pi) - field(theta)`` for fields
    that are only periodic up to a translation (e.g. the log-cylinder strip).
    The radial derivative is ``exp(-s) * d_s``.
    """
    return d_s(grid, field), d_theta(grid, field, period)


def d_r(grid: AnnulusGrid, field: np.ndarray) -> np.ndarray:
    f = np.asarray(field, dtype=float)
    return d_s(grid, f) / _bcast(grid, f, grid.r)


def d_ss(grid: AnnulusGrid, field: np.ndarray) -> np.ndarray:
    f = np.asarray(field, dtype=float)
    out = np.empty_like(f)
    h2 = grid.ds**2
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h2
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h2
    return out


def d_thetatheta(grid: AnnulusGrid, field: np.ndarray, period=None) -> np.ndarray:
    f = np.asarray(field, dtype=float)
    fp, fm = _theta_neighbours(f, period)
    return (fp - 2.0 * f + fm) / grid.dtheta**2


def second_derivatives(grid: AnnulusGrid, field: np.ndarray, period=None):
    """``(f_ss, f_s_theta, f_theta_theta)`` with the same stencils as above."""
    f = np.asarray(field, dtype=float)
    return (
        d_ss(grid, f),
        d_theta(grid, d_s(grid, f)),
        d_thetatheta(grid, f, period),
    )


def laplacian(grid: AnnulusGrid, field: np.ndarray, period=None) -> np.ndarray:
    """Euclidean Laplacian ``exp(-2s) (f_ss + f_theta_theta)``."""
    f = np.asarray(field, dtype=float)
    w = _bcast(grid, f, np.exp(-2.0 * grid.s))
    return w * (d_ss(grid, f) + d_thetatheta(grid, f, period))


def gradient_form(grid: AnnulusGrid, field: np.ndarray) -> OneForm:
    """The exact 1-form ``d(field)`` with discrete derivatives."""
    fs, ft = differentiate(grid, field)
    return OneForm(grid, fs / grid.R, ft)


def hodge_star(omega: OneForm) -> OneForm:
    """``*dtheta = dr/r`` and ``*dr = -r dtheta``; ``** = -1``."""
    R = omega.grid.R
    return OneForm(omega.grid, omega.w_theta / R, -R * omega.w_r)


def exterior_derivative(omega: OneForm) -> np.ndarray:
    """Coefficient ``g`` of ``d(omega) = g dr^dtheta``."""
    grid = omega.grid
    return d_r(grid, omega.w_theta) - d_theta(grid, omega.w_r)


def divergence(omega: OneForm) -> np.ndarray:
    """Divergence of the dual vector field, ``exp(-2s)(d_s w_s + d_theta w_theta)``."""
    grid = omega.grid
    return np.exp(-2.0 * grid.S) * (d_s(grid, omega.w_s) + d_theta(grid, omega.w_theta))


def grad_norm_sq(grid: AnnulusGrid, field: np.ndarray, period=None) -> np.ndarray:
    """Pointwise |grad f|^2, summed over ambient components."""
    f = np.asarray(field, dtype=float)
    fs, ft = differentiate(grid, f, period)
    g = (fs**2 + ft**2) * _bcast(grid, f, np.exp(-2.0 * grid.s))
    if g.ndim == 3:
        g = g.sum(axis=2)
    return g


def cartesian_derivatives(grid: AnnulusGrid, field: np.ndarray, period=None):
    """``(f_x, f_y)`` assembled node by node from the polar derivatives."""
    f = np.asarray(field, dtype=float)
    fs, ft = differentiate(grid, f, period)
    shape = (grid.n_s, grid.n_theta) + (1,) * (f.ndim - 2)
    inv_r = np.exp(-grid.S).reshape(shape)
    c = np.cos(grid.TH).reshape(shape)
    sn = np.sin(grid.TH).reshape(shape)
    fr = fs * inv_r
    ft_r = ft * inv_r
    return c * fr - sn * ft_r, sn * fr + c * ft_r


def jacobian(grid: AnnulusGrid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-component Jacobian pairing ``a_x b_y - a_y b_x``."""
    ax, ay = cartesian_derivatives(grid, a)
    bx, by = cartesian_derivatives(grid, b)
    return ax * by - ay * bx


def integrate(grid: AnnulusGrid, field, domain: str = "area", level: int | None = None) -> float:
    """Quadrature over the annulus, a circle ``s = s_level`` or a ray ``theta = theta_level``.

    area: trapezoid in s times rectangle in theta with ``dx = exp(2s) ds dtheta``.
    loop: integral of the pullback to the circle; for a OneForm this is
    ``sum w_theta dtheta``, for a scalar it is ``sum f dtheta``.
    ray: integral against ``dr`` along the ray (``w_r`` for a OneForm).
    """
    if domain == "area":
        f = np.asarray(field, dtype=float)
        rowsum = f.sum(axis=1) * grid.dtheta
        return float(np.dot(rowsum * np.exp(2.0 * grid.s), grid.trapezoid_weights))
    if domain == "loop":
        if level is None or not -grid.n_s <= level < grid.n_s:
            raise LevelOutOfRangeError(f"s-level {level!r} outside 0..{grid.n_s - 1}")
        f = field.w_theta if isinstance(field, OneForm) else np.asarray(field, dtype=float)
        return float(f[level].sum() * grid.dtheta)
    if domain == "ray":
        if level is None or not -grid.n_theta <= level < grid.n_theta:
            raise LevelOutOfRangeError(
                f"theta-level {level!r} outside 0..{grid.n_theta - 1}"
            )
        f = field.w_r if isinstance(field, OneForm) else np.asarray(field, dtype=float)
        return float(np.dot(f[:, level] * grid.r, grid.trapezoid_weights))
    raise ValueError(f"unknown domain {domain!r}; expected area, loop or ray")


def l2_norm(grid: AnnulusGrid, field: np.ndarray) -> float:
    f = np.asarray(field, dtype=float)
    sq = f**2 if f.ndim == 2 else (f**2).sum(axis=2)
    return math.sqrt(max(integrate(grid, sq), 0.0))


def dirichlet_norm(grid: AnnulusGrid, field: np.ndarray, period=None) -> float:
    """||grad f||_{L^2} over the annulus."""
    return math.sqrt(max(integrate(grid, grad_norm_sq(grid, field, period)), 0.0))


# -- CSV serialization -------------------------------------------------------


def write_field_csv(path, grid: AnnulusGrid, field: np.ndarray, names=None) -> None:
    """Write ``s,theta,value...`` rows, s outer and theta inner."""
    f = np.asarray(field, dtype=float)
    values = f.reshape(grid.n_s * grid.n_theta, -1)
    if names is None:
        names = ["value"] if values.shape[1] == 1 else [
            f"value{k + 1}" for k in range(values.shape[1])
        ]
    table = np.column_stack([grid.S.ravel(), grid.TH.ravel(), values])
    with atomic_write(path) as fh:
        fh.write(",".join(["s", "theta", *names]) + "\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")


def read_field_csv(path, grid: AnnulusGrid) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.n_s * grid.n_theta:
        raise ValueError(
            f"{path}: {data.shape[0]} rows, expected {grid.n_s * grid.n_theta}"
        )
    values = data[:, 2:]
    if values.shape[1] == 1:
        return values[:, 0].reshape(grid.shape)
    return values.reshape(grid.n_s, grid.n_theta, values.shape[1])
