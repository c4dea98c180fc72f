from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulab.frames import GaugeAngle, canonical_frame, constant_frame
from annulab.grid import make_grid
from annulab.io import dumps_json
from annulab.surfaces import default_grid, sample_catalog, sample_map
from annulab.theorems import (
    CHECKS,
    CSV_COLUMNS,
    SMALL_CURVATURE_LIMIT,
    CheckReport,
    Hypothesis,
    check_appendix_identities,
    check_canonical_frame,
    check_gauge_invariance,
    conformal_factor_bound,
    cor18_check,
    derived_constant,
    minimality_check,
    roundoff_floor,
    run_check,
    thm12_verify,
    thm17_check,
    thm110_verify,
)

# catenoid h = 0.01, closed forms: 4 pi tanh h, sqrt((2h - tanh h)/2h), sqrt(gamma / 2 pi)
THIN_GAMMA = 0.12566
THIN_BETA = 0.70712
THIN_SIGMA = 0.14141
THIN_CONDITION = 0.8236
THIN_LHS = 0.4304
THIN_RHS = 0.5013
# catenoid h = 0.5: 4 pi (h - tanh h)
CATENOID_I1 = 0.47604984
# 4 pi tanh 1.5
WIDE_GAMMA = 11.372


def test_registry_order():
    assert list(CHECKS) == ["lemma16", "appendix", "gauge", "thm12", "thm17", "cor18",
                            "thm110", "conformal_bound", "minimality"]
    with pytest.raises(KeyError):
        run_check("nosuch", sample_catalog("flat", make_grid(1, 2, 16, 32)))


@pytest.mark.parametrize("name", ["flat", "log_cylinder", "catenoid", "enneper"])
def test_canonical_frame_law(name):
    rep = check_canonical_frame(sample_catalog(name))
    assert rep.applicable and rep.passed, rep.to_text()


def test_canonical_frame_non_radial_factor(grid12):
    imm = sample_map(grid12, lambda x, y: (x + 0.1 * (x * x - y * y), y + 0.2 * x * y, 0 * x))
    rep = check_canonical_frame(imm)
    assert rep.passed, rep.to_text()
    assert not rep.quantities["full_coulomb"]
    assert "boundary_omega_nu" not in rep.residuals
    assert rep.quantities["boundary_residual"] > grid12.tau


def test_boundary_roundoff_for_constant_factor():
    for name in ("flat", "log_cylinder", "catenoid"):
        rep = check_canonical_frame(sample_catalog(name))
        assert rep.quantities["full_coulomb"]
        assert rep.quantities["boundary_residual"] <= roundoff_floor(sample_catalog(name).grid)


def test_appendix_catenoid(catenoid):
    rep = check_appendix_identities(catenoid)
    assert rep.passed, rep.to_text()
    assert rep.quantities["gauss_map_energy"] == pytest.approx(8 * math.pi * math.tanh(0.5),
                                                               abs=1e-2)


def test_appendix_flat(flat):
    rep = check_appendix_identities(flat)
    assert rep.passed, rep.to_text()


def test_appendix_log_cylinder_constant_frame(log_cylinder):
    rep = check_appendix_identities(log_cylinder, constant_frame(log_cylinder.grid))
    assert rep.passed
    for key in ("E", "F", "gauss_map_energy", "A_energy"):
        assert abs(rep.quantities[key]) < 1e-10


def test_gauge_explicit(flat, catenoid):
    g = flat.grid
    rep = check_gauge_invariance(flat, gauges=[GaugeAngle(g.S * np.sin(g.TH))])
    assert rep.passed
    assert rep.residuals["max_K_deviation"] <= g.tau
    rep = check_gauge_invariance(catenoid, gauges=[GaugeAngle(0.4)])
    assert rep.residuals["max_K_deviation"] < 1e-12
    rep = check_gauge_invariance(catenoid, gauges=[GaugeAngle(0.0, 2)])
    assert rep.residuals["max_K_deviation"] <= catenoid.grid.tau


def test_gauge_random(enneper):
    rep = check_gauge_invariance(enneper, trials=10, seed=3)
    assert rep.passed and rep.quantities["trials"] == 10


def test_thm12_thin_catenoid(thin_catenoid):
    rep = thm12_verify(thin_catenoid)
    q = rep.quantities
    assert rep.applicable and rep.passed, rep.to_text()
    assert q["gamma"] == pytest.approx(THIN_GAMMA, rel=1e-2)
    assert q["beta"] == pytest.approx(THIN_BETA, rel=1e-3)
    assert q["sigma"] == pytest.approx(THIN_SIGMA, rel=1e-2)
    assert q["condition"] == pytest.approx(THIN_CONDITION, rel=1e-2)
    assert q["period_ineq_lhs"] == pytest.approx(THIN_LHS, rel=1e-2)
    assert q["period_ineq_rhs"] == pytest.approx(THIN_RHS, rel=1e-2)
    assert q["period_ineq_margin"] >= 0
    assert abs(q["alpha"]) <= 1e-6
    assert abs(q["c_a"] - q["c_b"]) <= 1e-6


def test_thm12_wide_catenoid():
    rep = thm12_verify(sample_catalog("catenoid", params={"h": 1.5}))
    assert rep.na and rep.passed
    assert rep.quantities["gamma"] == pytest.approx(WIDE_GAMMA, rel=1e-2)
    assert not rep.hypotheses[1].satisfied


def test_thm12_flat_condition_fails(flat):
    # beta = 1 for the polar frame, so the small-energy condition is not met
    rep = thm12_verify(flat)
    assert rep.na
    assert rep.quantities["beta"] == pytest.approx(1.0, abs=1e-9)
    assert rep.quantities["E"] == pytest.approx(4 * math.pi * math.log(2), rel=1e-3)


def test_thm17(catenoid, log_cylinder, flat):
    rep = thm17_check(catenoid)
    assert rep.applicable and rep.passed, rep.to_text()
    q = rep.quantities
    assert q["I1"] == pytest.approx(CATENOID_I1, rel=1e-2)
    assert q["I2"] <= 1e-10
    assert not q["energy_side"] and not q["conformal_side"]
    assert q["beta"] ** 2 == pytest.approx(0.5379, abs=1e-3)

    rep = thm17_check(log_cylinder)
    assert rep.passed and rep.quantities["energy_side"] and rep.quantities["conformal_side"]

    rep = thm17_check(flat)
    assert rep.applicable and rep.passed, rep.to_text()
    assert rep.quantities["I1"] == pytest.approx(2 * math.pi * math.log(2), rel=1e-6)
    assert not rep.quantities["energy_side"] and not rep.quantities["conformal_side"]


def test_cor18(catenoid, flat):
    rep = cor18_check(sample_catalog("log_cylinder", params={"c": 0.3}))
    assert rep.applicable and rep.passed
    assert rep.quantities["fitted_c"] == pytest.approx(0.3, abs=1e-3)
    assert cor18_check(catenoid).na
    assert cor18_check(flat).na


def test_thm110(log_cylinder, thin_catenoid, flat):
    rep = thm110_verify(log_cylinder)
    assert rep.applicable and rep.passed
    assert rep.quantities["K_dmu_abs"] < SMALL_CURVATURE_LIMIT
    rep = thm110_verify(thin_catenoid)
    assert rep.na
    eq = rep.hypotheses[1]
    assert not eq.satisfied and eq.borderline
    assert rep.quantities["I1"] == pytest.approx(4 * math.pi * (0.01 - math.tanh(0.01)),
                                                 rel=5e-2)
    rep = thm110_verify(flat)
    assert rep.na and not rep.hypotheses[1].borderline


def test_conformal_bound(catenoid, flat, log_cylinder):
    rep = conformal_factor_bound(catenoid)
    assert rep.passed and rep.applicable
    assert rep.quantities["reconstruction_error"] <= catenoid.grid.tau
    assert rep.quantities["c_a"] == pytest.approx(math.log(math.cosh(0.5)) - 0.5)
    assert rep.quantities["c_b"] == pytest.approx(math.log(math.cosh(0.5)) + 0.5)
    rep = conformal_factor_bound(flat)
    assert rep.passed and rep.quantities["reconstruction_error"] <= flat.grid.tau
    rep = conformal_factor_bound(log_cylinder)
    assert rep.passed and rep.quantities["v_sup"] < 1e-10


def test_minimality_check(catenoid):
    assert minimality_check(catenoid).passed


def test_derived_constant_closed_form():
    @settings(max_examples=50, deadline=None)
    @given(beta=st.floats(0.0, 0.9), gamma=st.floats(0.0, 2 * math.pi))
    def inner(beta, gamma):
        sigma = math.sqrt(gamma / (2 * math.pi))
        C = derived_constant(beta, gamma)
        if sigma + beta < 1 - 1e-6:
            assert C == pytest.approx((1 - sigma - beta) ** -2, rel=1e-9)
        else:
            assert C == math.inf or C > 1e6

    inner()


def test_report_semantics():
    hyp_ok = Hypothesis("x", 0.0, 1.0, True)
    rep = CheckReport("demo", "s", (hyp_ok,), {}, {"a": 0.1, "b": math.nan},
                      {"a": 1.0, "b": 1.0}, 0.1, {"n_s": 8, "n_theta": 8})
    assert rep.failures == ["b"] and not rep.passed
    na = CheckReport("demo", "s", (Hypothesis("x", 2.0, 1.0, False),), {}, {"a": 5.0},
                     {"a": 1.0})
    assert na.passed and na.status() == "N/A"
    assert math.isnan(CheckReport("demo", "s").margin)


def test_report_json_schema(catenoid):
    rep = run_check("thm17", catenoid)
    d = rep.to_dict()
    assert list(d) == ["name", "surface", "passed", "applicable", "margin", "tolerance", "grid",
                       "hypotheses", "quantities", "residuals", "limits", "notes"]
    assert set(d["residuals"]) == set(d["limits"])
    json.loads(dumps_json(d))
    assert len(rep.csv_row()) == len(CSV_COLUMNS)
    assert dumps_json(rep.to_dict()) == dumps_json(run_check("thm17", catenoid).to_dict())


def test_tolerance_override(catenoid):
    rep = run_check("appendix", catenoid, tolerance=1e-9)
    assert rep.tolerance == 1e-9
    assert not rep.passed
