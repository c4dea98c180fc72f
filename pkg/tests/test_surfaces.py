from __future__ import annotations

import math

import numpy as np
import pytest

from annulab.errors import (
    ConfigError,
    DegenerateImmersionError,
    NonvanishingPeriodError,
    PoleOnAnnulusError,
    UnknownSurfaceError,
)
from annulab.grid import make_grid
from annulab.surfaces import (
    CATALOG,
    CATENOID_DATA,
    ENNEPER_DATA,
    HELICOID_DATA,
    WeierstrassData,
    conformal_data,
    default_grid,
    fundamental_forms,
    gauss_map,
    minimality_residual,
    orthonormalize,
    resolve_params,
    rigid_align,
    sample_catalog,
    sample_map,
    weierstrass_generate,
    write_mesh,
    write_point_cloud,
)
from annulab.grid import integrate

# log cosh(0.5) - 0.5
CATENOID_U_EDGE = -0.37988549304172
# 8 pi tanh 0.5 and 4 pi tanh 0.5
CATENOID_A_ENERGY = 11.614271
CATENOID_K_TOTAL = 5.807136
# max of max(|f_r|^2 - |f_theta/r|^2, cross) / e^{2u} for (r cos t, 2 r sin t)
STRETCHED_RESIDUAL = 1.2


def test_catalog_names():
    assert list(CATALOG) == ["flat", "log_cylinder", "catenoid", "enneper"]


def test_flat_factor(flat):
    assert np.abs(flat.u).max() == 0.0
    # x = e^s cos t is not reproduced exactly by the stencils
    u, res = conformal_data(flat)
    assert res <= flat.grid.tau
    assert np.abs(u).max() <= flat.grid.tau


def test_log_cylinder_factor():
    imm = sample_catalog("log_cylinder", params={"c": 0.0})
    np.testing.assert_allclose(imm.u, -imm.grid.S)
    u, res = conformal_data(imm)
    assert res < 1e-12
    np.testing.assert_allclose(u, imm.u, atol=1e-12)


def test_catenoid_factor(catenoid):
    assert catenoid.u[-1, 0] == pytest.approx(CATENOID_U_EDGE, abs=1e-12)
    u, res = conformal_data(catenoid)
    assert res <= catenoid.grid.tau
    assert np.abs(u - catenoid.u).max() <= catenoid.grid.tau


def test_non_conformal_map_flagged(grid12):
    imm = sample_map(grid12, lambda x, y: (x, 2 * y, 0 * x))
    _, res = conformal_data(imm)
    assert res == pytest.approx(STRETCHED_RESIDUAL, rel=1e-3)
    assert res > grid12.tau


def test_default_domains():
    g = default_grid("catenoid", {"h": 0.25})
    assert g.b == pytest.approx(math.exp(-0.25))
    assert default_grid("enneper").summary() == {"b": 0.5, "a": 1.0, "n_s": 128, "n_theta": 256}


@pytest.mark.parametrize("name,params,exc", [
    ("nosuch", {}, UnknownSurfaceError),
    ("catenoid", {"k": 1}, ConfigError),
    ("catenoid", {"h": "wide"}, ConfigError),
    ("catenoid", {"h": "inf"}, ConfigError),
    ("catenoid", {"h": -1}, ConfigError),
    ("flat", {"dim": 2}, ConfigError),
])
def test_resolve_params_errors(name, params, exc):
    with pytest.raises(exc):
        resolve_params(name, params)


def test_unknown_surface_message():
    with pytest.raises(UnknownSurfaceError, match="unknown surface: nosuch"):
        sample_catalog("nosuch")


def test_higher_codimension():
    imm = sample_catalog("catenoid", params={"dim": 5})
    assert imm.dim == 5
    assert np.abs(imm.f[..., 3:]).max() == 0.0


def test_tangent_basis_orthonormal(enneper):
    e1, e2 = enneper.tangent_basis
    assert np.abs(np.linalg.norm(e1, axis=-1) - 1).max() < 1e-14
    assert np.abs(np.linalg.norm(e2, axis=-1) - 1).max() < 1e-14
    assert np.abs((e1 * e2).sum(-1)).max() < 1e-14


def test_catenoid_tangent_basis(catenoid):
    g = catenoid.grid
    e1, e2 = catenoid.tangent_basis
    ref1 = np.stack([np.tanh(g.S) * np.cos(g.TH), np.tanh(g.S) * np.sin(g.TH),
                     1 / np.cosh(g.S)], axis=-1)
    ref2 = np.stack([-np.sin(g.TH), np.cos(g.TH), 0 * g.S], axis=-1)
    assert np.abs(e1 - ref1).max() <= g.tau
    assert np.abs(e2 - ref2).max() <= g.tau


def test_orthonormalize_degenerate():
    v = np.ones((2, 2, 3))
    with pytest.raises(DegenerateImmersionError):
        orthonormalize(v, 2 * v)


def test_flat_fundamental_forms(flat):
    ff = fundamental_forms(flat)
    assert np.sqrt(ff.A.norm_sq).max() < 1e-10
    assert np.abs(ff.K).max() == 0.0
    assert np.abs(ff.H).max() <= flat.grid.tau


def test_log_cylinder_fundamental_forms(log_cylinder):
    ff = fundamental_forms(log_cylinder)
    tau = log_cylinder.grid.tau
    assert np.sqrt(ff.A.norm_sq).max() <= tau
    assert np.abs(ff.K).max() <= tau


def test_catenoid_curvature_integrals(catenoid):
    g = catenoid.grid
    ff = fundamental_forms(catenoid)
    dmu = np.exp(2 * catenoid.u)
    assert integrate(g, np.abs(ff.K) * dmu) == pytest.approx(CATENOID_K_TOTAL, abs=g.tau)
    assert integrate(g, ff.A.norm_sq * dmu) == pytest.approx(CATENOID_A_ENERGY, abs=g.tau)
    # Gauss equation through the second fundamental form
    assert np.abs((ff.A.K_gauss - ff.K) * dmu).max() <= g.tau
    assert ff.A.normal_defect(catenoid) < 1e-12


def test_gauss_map(flat, catenoid):
    gm = gauss_map(flat)
    assert np.abs(gm.energy_density).max() <= flat.grid.tau
    assert np.abs(gm.X - gm.X[0, 0]).max() < 1e-12
    for imm in (flat, catenoid):
        X = gauss_map(imm).X
        assert np.abs(np.linalg.norm(X, axis=-1) - 1).max() <= 1e-12
    g = catenoid.grid
    energy = integrate(g, gauss_map(catenoid).energy_density)
    assert energy == pytest.approx(CATENOID_A_ENERGY, abs=g.tau)


def test_minimality(flat, catenoid):
    assert minimality_residual(flat) <= flat.grid.tau
    assert minimality_residual(catenoid) <= catenoid.grid.tau


def test_graph_not_minimal(grid12):
    eps = 1e-3
    imm = sample_map(grid12, lambda x, y: (x, y, eps * (x * x + y * y)))
    assert minimality_residual(imm) == pytest.approx(4 * eps, rel=1e-3)


def test_weierstrass_catenoid(catenoid):
    g = catenoid.grid
    w = weierstrass_generate(CATENOID_DATA, g)
    assert np.abs(w.u - catenoid.u).max() <= g.tau
    _, dist = rigid_align(w.f, catenoid.f)
    assert dist <= g.tau
    u_num, res = conformal_data(w)
    assert res <= g.tau
    assert np.abs(u_num - w.u).max() <= g.tau


def test_weierstrass_path_independence(catenoid):
    g = catenoid.grid
    a = weierstrass_generate(CATENOID_DATA, g, ray_index=0)
    b = weierstrass_generate(CATENOID_DATA, g, ray_index=77)
    assert np.abs(a.f - b.f).max() <= g.tau


def test_weierstrass_helicoid_rejected(catenoid):
    with pytest.raises(NonvanishingPeriodError) as exc:
        weierstrass_generate(HELICOID_DATA, catenoid.grid)
    p = exc.value.periods
    assert abs(p[0]) < 1e-6 and abs(p[1]) < 1e-6
    assert p[2] == pytest.approx(-2 * math.pi, abs=1e-6)


def test_weierstrass_enneper(enneper):
    g = enneper.grid
    w = weierstrass_generate(ENNEPER_DATA, g)
    assert minimality_residual(w) <= g.tau
    np.testing.assert_allclose(w.u, enneper.u, atol=1e-12)
    _, dist = rigid_align(w.f, enneper.f)
    assert dist <= g.tau


def test_weierstrass_pole_on_annulus():
    g = make_grid(0.5, 2.0, 64, 128)
    with pytest.raises(PoleOnAnnulusError):
        weierstrass_generate(WeierstrassData({0: 1.0, 1: -1.0}, {0: 1.0}), g)


def test_rigid_align_recovers_motion(catenoid):
    th = 0.7
    Rm = np.array([[math.cos(th), -math.sin(th), 0], [math.sin(th), math.cos(th), 0], [0, 0, 1]])
    moved = catenoid.f @ Rm.T + np.array([1.0, -2.0, 0.5])
    aligned, dist = rigid_align(moved, catenoid.f)
    assert dist < 1e-12


def test_exports(tmp_path, catenoid, log_cylinder):
    write_mesh(tmp_path / "c.obj", catenoid)
    lines = (tmp_path / "c.obj").read_text().splitlines()
    n_s, n_t = catenoid.grid.shape
    assert sum(l.startswith("v ") for l in lines) == n_s * n_t
    assert sum(l.startswith("f ") for l in lines) == 2 * (n_s - 1) * n_t
    write_mesh(tmp_path / "l.obj", log_cylinder)
    lines = (tmp_path / "l.obj").read_text().splitlines()
    assert sum(l.startswith("f ") for l in lines) == 2 * (n_s - 1) * (n_t - 1)
    write_point_cloud(tmp_path / "c.csv", catenoid)
    rows = (tmp_path / "c.csv").read_text().splitlines()
    assert rows[0] == "s,theta,x1,x2,x3"
    assert len(rows) == n_s * n_t + 1
