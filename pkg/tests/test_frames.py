from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulab.errors import FrameNotTangentError
from annulab.frames import (
    Frame,
    GaugeAngle,
    canonical_frame,
    connection_form,
    constant_frame,
    coulomb_minimize,
    coulomb_residual,
    dirichlet_functional,
    frame_k,
    frame_metrics,
    gauge_rotate,
    reconstruct_gauge,
    write_frame_csv,
)
from annulab.grid import d_s, d_theta, differentiate, make_grid
from annulab.surfaces import default_grid, sample_catalog, sample_map
from annulab.theorems import random_gauge

# catenoid h = 0.5: 4 pi (h - tanh h) and sqrt((2h - tanh h) / 2h)
CATENOID_F = 0.47604984
CATENOID_BETA = 0.73339630


def test_flat_canonical_frame(flat):
    g = flat.grid
    fr = canonical_frame(flat)
    ref1 = np.stack([np.cos(g.TH), np.sin(g.TH), 0 * g.S], axis=-1)
    ref2 = np.stack([-np.sin(g.TH), np.cos(g.TH), 0 * g.S], axis=-1)
    assert np.abs(fr.e1 - ref1).max() <= g.tau
    assert np.abs(fr.e2 - ref2).max() <= g.tau


def test_log_cylinder_frame_constant(log_cylinder):
    fr = canonical_frame(log_cylinder)
    assert np.abs(fr.e1 - np.array([1.0, 0, 0])).max() < 1e-12
    assert np.abs(fr.e2 - np.array([0, 1.0, 0])).max() < 1e-12


def test_unwinding_flat_frame(flat):
    g = flat.grid
    fr = gauge_rotate(canonical_frame(flat), GaugeAngle(0.0, -1))
    assert fr.winding == -1
    assert np.abs(fr.e1 - np.array([1.0, 0, 0])).max() <= g.tau
    assert frame_metrics(flat, fr).E <= g.tau
    assert frame_metrics(flat, canonical_frame(flat)).E == pytest.approx(
        4 * math.pi * math.log(2), rel=1e-3)


def test_trivial_rotations(catenoid):
    fr = canonical_frame(catenoid)
    same = gauge_rotate(fr, GaugeAngle(np.zeros(catenoid.grid.shape)))
    np.testing.assert_array_equal(same.e1, fr.e1)
    quarter = gauge_rotate(fr, GaugeAngle(math.pi / 2))
    assert np.abs(quarter.e1 - fr.e2).max() < 1e-15
    assert np.abs(quarter.e2 + fr.e1).max() < 1e-15
    assert frame_metrics(None, quarter).E == pytest.approx(frame_metrics(None, fr).E, rel=1e-13)


def test_connection_form_oracles(flat, catenoid):
    om = connection_form(canonical_frame(flat))
    assert np.abs(om.w_r).max() < 1e-10
    assert np.abs(om.w_theta - 1).max() <= flat.grid.tau
    g = catenoid.grid
    om = connection_form(canonical_frame(catenoid))
    assert np.abs(om.w_r).max() < 1e-10
    assert np.abs(om.w_theta - np.tanh(g.S)).max() <= g.tau


@pytest.mark.parametrize("name", ["flat", "log_cylinder", "catenoid", "enneper"])
def test_connection_form_law(name):
    imm = sample_catalog(name)
    g = imm.grid
    om = connection_form(canonical_frame(imm))
    u_s, u_t = differentiate(g, imm.u)
    assert np.abs(om.w_r + u_t / g.R).max() <= g.tau
    assert np.abs(om.w_theta - (1 + u_s)).max() <= g.tau


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), winding=st.sampled_from([0, 1, -1, 2, -2]))
def test_gauge_shifts_connection_by_dphi(seed, winding, catenoid):
    g = catenoid.grid
    fr = canonical_frame(catenoid)
    theta = random_gauge(g, np.random.default_rng(seed))
    rot = gauge_rotate(fr, GaugeAngle(theta, winding))
    w0, w1 = connection_form(fr), connection_form(rot)
    phi_s, phi_t = d_s(g, theta), d_theta(g, theta) + winding
    scale = 1 + np.abs(phi_s).max() + np.abs(phi_t).max()
    assert np.abs(w1.w_s - w0.w_s - phi_s).max() <= g.tau * scale
    assert np.abs(w1.w_theta - w0.w_theta - phi_t).max() <= g.tau * scale
    assert rot.orthonormality_defect() < 1e-12


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), winding=st.sampled_from([0, 1, -1, 2, -2]))
def test_jacobian_pairing_gauge_invariant(seed, winding, catenoid):
    g = catenoid.grid
    fr = canonical_frame(catenoid)
    K0 = frame_k(fr)
    rot = gauge_rotate(fr, GaugeAngle(random_gauge(g, np.random.default_rng(seed)), winding))
    assert np.abs(frame_k(rot) - K0).max() <= g.tau * (1 + np.abs(K0).max())


def test_constant_gauge_exact(enneper):
    fr = canonical_frame(enneper)
    rot = gauge_rotate(fr, GaugeAngle(1.234))
    assert np.abs(frame_k(rot) - frame_k(fr)).max() < 1e-12


def test_frame_k_oracles(flat, catenoid):
    assert np.abs(frame_k(canonical_frame(flat))).max() <= flat.grid.tau
    g = catenoid.grid
    ref = -np.exp(-2 * g.S) / np.cosh(g.S) ** 2
    assert np.abs(frame_k(canonical_frame(catenoid)) - ref).max() <= g.tau


def test_flat_metrics():
    g = make_grid(1, math.e, 128, 256)
    imm = sample_catalog("flat", g)
    m = frame_metrics(imm, canonical_frame(imm))
    assert m.E == pytest.approx(4 * math.pi, rel=1e-2)
    assert m.F == pytest.approx(2 * math.pi, rel=1e-2)
    assert m.gamma <= g.tau
    # all of the energy is in the theta-derivatives
    assert m.beta == pytest.approx(1.0, abs=1e-12)
    assert m.split_residual == pytest.approx(0.0, abs=g.tau * m.E)


def test_catenoid_metrics(catenoid):
    m = frame_metrics(catenoid, canonical_frame(catenoid))
    assert m.E == pytest.approx(4 * math.pi, rel=1e-2)
    assert m.F == pytest.approx(CATENOID_F, rel=1e-2)
    assert m.beta == pytest.approx(CATENOID_BETA, rel=5e-3)
    assert m.winding == 0
    assert set(m.to_json()) >= {"E", "F", "beta", "gamma", "theta_energy", "winding"}


def test_constant_frame_zero_energy(flat):
    m = frame_metrics(flat, constant_frame(flat.grid))
    assert m.E == 0.0
    assert m.zero_energy
    assert math.isnan(m.beta)


def test_coulomb_residual_canonical(flat, catenoid, enneper):
    for imm in (flat, catenoid, enneper):
        interior, boundary = coulomb_residual(canonical_frame(imm))
        assert interior <= imm.grid.tau
    assert coulomb_residual(canonical_frame(flat))[1] < 1e-10


def test_coulomb_residual_semi_only(grid12):
    # z -> z + 0.1 z^2 is conformal with u varying along the circles
    imm = sample_map(grid12, lambda x, y: (x + 0.1 * (x * x - y * y), y + 0.2 * x * y, 0 * x))
    g = imm.grid
    _, boundary = coulomb_residual(canonical_frame(imm))
    u_t = d_theta(g, imm.u)
    expected = max(np.abs(u_t[0] / g.r[0]).max(), np.abs(u_t[-1] / g.r[-1]).max())
    assert boundary > g.tau
    assert boundary == pytest.approx(expected, rel=1e-2)


def test_coulomb_minimize_flat(flat):
    g = flat.grid
    fr, gauge = coulomb_minimize(flat, canonical_frame(flat))
    assert np.ptp(gauge.theta) <= g.tau
    assert dirichlet_functional(fr) == pytest.approx(2 * math.pi * math.log(2), abs=g.tau)


def test_coulomb_minimize_recovers_gauge(flat):
    g = flat.grid
    theta0 = np.sin(g.TH) * (g.S - g.s_min)
    start = gauge_rotate(canonical_frame(flat), GaugeAngle(theta0))
    assert dirichlet_functional(start) > 2 * math.pi * math.log(2) + 0.1
    fr, gauge = coulomb_minimize(flat, start)
    assert dirichlet_functional(fr) == pytest.approx(2 * math.pi * math.log(2), abs=g.tau)
    assert np.ptp(gauge.theta + theta0) <= g.tau


def test_coulomb_minimize_catenoid(catenoid):
    g = catenoid.grid
    fr, gauge, info = coulomb_minimize(catenoid, canonical_frame(catenoid), full_output=True)
    assert np.ptp(gauge.theta) <= g.tau
    assert dirichlet_functional(fr) == pytest.approx(CATENOID_F, abs=g.tau)
    assert abs(info.compatibility_defect) <= g.tau


def test_reconstruct_gauge_flat(flat):
    g = flat.grid
    gauge, res = reconstruct_gauge(flat, canonical_frame(flat))
    assert gauge.winding == -1
    assert np.abs(gauge.theta).max() <= g.tau
    assert res <= g.tau
    gauge, res = reconstruct_gauge(flat, constant_frame(g))
    assert gauge.winding == 0
    assert np.abs(gauge.theta).max() <= g.tau
    assert res <= g.tau


def test_reconstruct_gauge_catenoid(catenoid):
    gauge, res = reconstruct_gauge(catenoid, canonical_frame(catenoid))
    assert gauge.winding == -1
    assert res <= catenoid.grid.tau


def test_reconstruct_gauge_rejects_normal_frame(catenoid):
    with pytest.raises(FrameNotTangentError):
        reconstruct_gauge(catenoid, constant_frame(catenoid.grid))


def test_frame_csv(tmp_path, small_grid):
    imm = sample_catalog("flat", small_grid)
    write_frame_csv(tmp_path / "f.csv", canonical_frame(imm))
    rows = (tmp_path / "f.csv").read_text().splitlines()
    assert rows[0] == "s,theta,e1_1,e1_2,e1_3,e2_1,e2_2,e2_3"
    assert len(rows) == 1 + small_grid.n_s * small_grid.n_theta
