"""Moving frames on immersed annuli.

A gauge rotation by the angle ``phi = theta + k * theta_c`` (``theta_c`` the
polar angle of the domain, ``theta`` single-valued) acts as

    e1' = cos(phi) e1 + sin(phi) e2,   e2' = -sin(phi) e1 + cos(phi) e2,

and shifts the connection form ``omega = <d e1, e2>`` by ``d phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from annulab.errors import FrameNotTangentError
from annulab.grid import (
    AnnulusGrid,
    OneForm,
    cartesian_derivatives,
    d_s,
    d_theta,
    divergence,
    exterior_derivative,
    hodge_star,
    integrate,
    jacobian,
)
from annulab.io import write_csv
from annulab.pde import poisson_neumann
from annulab.surfaces import Immersion, gauss_map, plucker

ZERO_ENERGY = 1e-14


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...k,...k->...", a, b)


@dataclass(frozen=True, eq=False)
class Frame:
    grid: AnnulusGrid
    e1: np.ndarray
    e2: np.ndarray
    winding: int = 0

    def orthonormality_defect(self) -> float:
        return float(max(
            np.abs(np.linalg.norm(self.e1, axis=-1) - 1.0).max(),
            np.abs(np.linalg.norm(self.e2, axis=-1) - 1.0).max(),
            np.abs(_dot(self.e1, self.e2)).max(),
        ))

    def bivector(self) -> np.ndarray:
        return plucker(self.e1, self.e2)


@dataclass(frozen=True, eq=False)
class GaugeAngle:
    theta: np.ndarray | float
    winding: int = 0

    def total(self, grid: AnnulusGrid) -> np.ndarray:
        return np.broadcast_to(self.theta, grid.shape) + self.winding * grid.TH


def canonical_frame(imm: Immersion) -> Frame:
    """``(e^-u f_r, r^-1 e^-u f_theta)``, orthonormalized symmetrically node by node."""
    e1, e2 = imm.tangent_basis
    return Frame(imm.grid, e1, e2, 0)


def constant_frame(grid: AnnulusGrid, dim: int = 3) -> Frame:
    e1 = np.zeros(grid.shape + (dim,))
    e2 = np.zeros(grid.shape + (dim,))
    e1[..., 0] = 1.0
    e2[..., 1] = 1.0
    return Frame(grid, e1, e2, -1)


def gauge_rotate(frame: Frame, gauge: GaugeAngle) -> Frame:
    phi = gauge.total(frame.grid)
    c = np.cos(phi)[..., None]
    s = np.sin(phi)[..., None]
    return Frame(
        frame.grid,
        c * frame.e1 + s * frame.e2,
        -s * frame.e1 + c * frame.e2,
        frame.winding + gauge.winding,
    )


def connection_form(frame: Frame) -> OneForm:
    """``<d e1, e2>``, antisymmetrized so that ``<d e2, e1> = -omega`` exactly."""
    grid = frame.grid
    e1s, e1t = d_s(grid, frame.e1), d_theta(grid, frame.e1)
    e2s, e2t = d_s(grid, frame.e2), d_theta(grid, frame.e2)
    w_s = 0.5 * (_dot(e1s, frame.e2) - _dot(e2s, frame.e1))
    w_t = 0.5 * (_dot(e1t, frame.e2) - _dot(e2t, frame.e1))
    return OneForm.from_s_components(grid, w_s, w_t)


def k_bilinear(grid: AnnulusGrid, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """``sum_k (e1^k_x e2^k_y - e1^k_y e2^k_x)``."""
    return jacobian(grid, e1, e2).sum(axis=-1)


def frame_k(frame: Frame) -> np.ndarray:
    return k_bilinear(frame.grid, frame.e1, frame.e2)


@dataclass(frozen=True)
class FrameMetrics:
    E: float
    F: float
    beta: float
    theta_energy: float
    gamma: float
    winding: int
    K_integral: float = 0.0
    gauss_energy: float = 0.0
    zero_energy: bool = False

    @property
    def split_residual(self) -> float:
        """``E - 2F - int |grad X|^2``."""
        return self.E - 2.0 * self.F - self.gauss_energy

    def to_json(self) -> dict:
        return {
            "E": self.E,
            "F": self.F,
            "beta": self.beta,
            "gamma": self.gamma,
            "theta_energy": self.theta_energy,
            "winding": self.winding,
            "K_integral": self.K_integral,
            "gauss_energy": self.gauss_energy,
            "zero_energy": self.zero_energy,
        }


def frame_energy_densities(frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise ``|grad e1|^2 + |grad e2|^2`` and its theta part ``r^-2 |d_theta e_i|^2``."""
    grid = frame.grid
    inv_r2 = np.exp(-2.0 * grid.S)
    theta_part = np.zeros(grid.shape)
    full = np.zeros(grid.shape)
    for e in (frame.e1, frame.e2):
        es, et = d_s(grid, e), d_theta(grid, e)
        tt = inv_r2 * _dot(et, et)
        theta_part += tt
        full += tt + inv_r2 * _dot(es, es)
    return full, theta_part


def frame_metrics(imm: Immersion | None, frame: Frame) -> FrameMetrics:
    grid = frame.grid
    full, theta_part = frame_energy_densities(frame)
    E = integrate(grid, full)
    theta_energy = integrate(grid, theta_part)
    F = integrate(grid, connection_form(frame).norm_sq())
    K = frame_k(frame)
    gamma = integrate(grid, np.abs(K))
    gauss_energy = 0.0
    if imm is not None:
        gauss_energy = integrate(grid, gauss_map(imm).energy_density)
    zero = E <= ZERO_ENERGY
    beta = math.nan if zero else math.sqrt(theta_energy / E)
    return FrameMetrics(
        E=E, F=F, beta=beta, theta_energy=theta_energy, gamma=gamma,
        winding=frame.winding, K_integral=integrate(grid, K),
        gauss_energy=gauss_energy, zero_energy=zero,
    )


def coulomb_residual(frame: Frame, omega: OneForm | None = None) -> tuple[float, float]:
    """``(max |d * omega|`` over interior nodes, ``max |omega(nu)|`` on the circles).

    The frame already holds one derivative of the immersion and ``d * omega``
    adds two more, so a one-sided boundary stencil is amplified by ``1/h`` on
    each of the first three rows.  The interior maximum skips those rows.
    """
    omega = connection_form(frame) if omega is None else omega
    d_star = exterior_derivative(hodge_star(omega))
    interior = float(np.abs(d_star[3:-3]).max())
    boundary = float(max(np.abs(omega.w_r[0]).max(), np.abs(omega.w_r[-1]).max()))
    return interior, boundary


def dirichlet_functional(frame: Frame, gauge: GaugeAngle | None = None) -> float:
    """``F`` after rotating by ``gauge``: ``int |omega + d phi|^2 dx``."""
    f = frame if gauge is None else gauge_rotate(frame, gauge)
    return integrate(frame.grid, connection_form(f).norm_sq())


def coulomb_minimize(imm: Immersion | None, start: Frame, full_output: bool = False):
    """Rotate ``start`` by the single-valued angle minimizing ``int |omega + d theta|^2``.

    Solves ``lap theta = -div omega`` with ``d theta/d nu = -omega(nu)``.  The
    winding class of ``start`` is kept.  If the rotated frame does not lower
    ``F`` (``start`` already optimal to round-off) ``start`` is returned with a
    zero gauge.
    """
    grid = start.grid
    omega = connection_form(start)
    rhs = -divergence(omega)
    theta, info = poisson_neumann(
        grid, rhs, flux_a=-omega.w_r[-1], flux_b=omega.w_r[0], full_output=True
    )
    gauge = GaugeAngle(theta, 0)
    frame = gauge_rotate(start, gauge)
    if dirichlet_functional(frame) > dirichlet_functional(start):
        gauge = GaugeAngle(np.zeros(grid.shape), 0)
        frame = start
    if full_output:
        return frame, gauge, info
    return frame, gauge


def tangent_defect(imm: Immersion, frame: Frame) -> float:
    """Max distance between the frame bivector and the Gauss map."""
    t1, t2 = imm.tangent_basis
    return float(np.abs(frame.bivector() - plucker(t1, t2)).max())


def _unwrap_field(psi: np.ndarray) -> np.ndarray:
    out = np.unwrap(psi, axis=1)
    col = np.unwrap(out[:, 0])
    return out + (col - out[:, 0])[:, None]


def reconstruct_gauge(imm: Immersion, frame: Frame, tangent_tol: float = 1e-6):
    """Angle ``phi`` with ``e^-u f_x = cos(phi) e1 + sin(phi) e2``.

    Returns ``(GaugeAngle, compat_residual)``: the winding of ``phi`` around the
    annulus, its single-valued part, and the max residual of the integrability
    equations ``phi_x + u_y = <d_x e2, e1>``, ``phi_y - u_x = <d_y e2, e1>``.
    """
    grid = imm.grid
    c = np.cos(grid.TH)[..., None]
    s = np.sin(grid.TH)[..., None]
    f_x = c * imm.f_r - s * imm.f_theta / grid.R[..., None]
    p1, p2 = _dot(f_x, frame.e1), _dot(f_x, frame.e2)
    norm2 = _dot(f_x, f_x)
    if np.any(p1**2 + p2**2 < (1.0 - tangent_tol) * norm2):
        raise FrameNotTangentError("frame does not span the tangent planes of the immersion")
    phi = np.arctan2(p2, p1)
    jumps = np.angle(np.exp(1j * (np.roll(phi, -1, axis=1) - phi)))
    windings = np.rint(jumps.sum(axis=1) / (2.0 * math.pi)).astype(int)
    k = int(windings[grid.n_s // 2])
    psi = _unwrap_field(np.angle(np.exp(1j * (phi - k * grid.TH))))
    gauge = GaugeAngle(psi, k)

    psi_x, psi_y = cartesian_derivatives(grid, psi)
    R = grid.R
    phi_x = psi_x - k * np.sin(grid.TH) / R
    phi_y = psi_y + k * np.cos(grid.TH) / R
    u_x, u_y = cartesian_derivatives(grid, imm.u)
    e2_x, e2_y = cartesian_derivatives(grid, frame.e2)
    e1_x, e1_y = cartesian_derivatives(grid, frame.e1)
    # antisymmetrized like the connection form
    w_x = 0.5 * (_dot(e2_x, frame.e1) - _dot(e1_x, frame.e2))
    w_y = 0.5 * (_dot(e2_y, frame.e1) - _dot(e1_y, frame.e2))
    res = np.maximum(np.abs(phi_x + u_y - w_x), np.abs(phi_y - u_x - w_y))
    return gauge, float(res.max())


def write_frame_csv(path, frame: Frame) -> None:
    grid = frame.grid
    n = frame.e1.shape[-1]
    header = (["s", "theta"] + [f"e1_{k + 1}" for k in range(n)]
              + [f"e2_{k + 1}" for k in range(n)])
    table = np.column_stack([
        grid.S.ravel(), grid.TH.ravel(),
        frame.e1.reshape(-1, n), frame.e2.reshape(-1, n),
    ])
    write_csv(path, header, table.tolist())


__all__ = [
    "Frame",
    "FrameMetrics",
    "GaugeAngle",
    "canonical_frame",
    "connection_form",
    "constant_frame",
    "coulomb_minimize",
    "coulomb_residual",
    "dirichlet_functional",
    "frame_energy_densities",
    "frame_k",
    "frame_metrics",
    "gauge_rotate",
    "k_bilinear",
    "reconstruct_gauge",
    "tangent_defect",
    "write_frame_csv",
]
