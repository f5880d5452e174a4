import math

import pytest

import becsq


def test_no_interaction_is_poissonian():
    p = becsq.TwoModeParams(n_a=50.0, n_b=30.0, tau_hold=1e-3, theta=0.7, phi=0.3)
    r = becsq.evaluate(p)
    assert r.N_a + r.N_b == pytest.approx(80.0, rel=1e-12)
    assert r.var_Na == pytest.approx(r.N_a, rel=1e-9)
    assert r.var_diff == pytest.approx(80.0, rel=1e-9)


def test_closed_form_matches_fock():
    p = becsq.TwoModeParams(n_a=4.0, n_b=3.0, chi_aa=0.2, chi_ab=0.05, chi_bb=0.1, tau_hold=1.0, theta=1.1, phi=0.4)
    e = becsq.evaluate(p)
    o = becsq.fock_oracle(p)
    for name in ("N_a", "N_b", "var_Na", "var_Nb", "var_diff"):
        assert getattr(e, name) == pytest.approx(getattr(o, name), rel=1e-6)


def test_optimize_theta_beats_grid():
    p = becsq.TwoModeParams(n_a=5e5, n_b=5e5, chi_aa=0.04, chi_bb=0.01, tau_hold=4e-4, phi=0.1)
    theta, db = becsq.optimize_theta(p, "Na")
    assert 0.0 <= theta < math.pi
    for k in range(64):
        p.theta = math.pi * k / 64
        assert becsq.evaluate(p).db_Na <= db + 1e-6


def test_invalid_params_raise():
    with pytest.raises(Exception):
        becsq.TwoModeParams(n_a=-1.0, n_b=1.0)
    with pytest.raises(ValueError):
        becsq.optimize_theta(becsq.TwoModeParams(n_a=1.0, n_b=1.0), "bogus")


def test_uniform_box_chi():
    # chi = U / (hbar V) for a uniform mode.
    hbar = 1.054571817e-34
    U = 5e-51
    chi = becsq.mode_reduction.chi_uniform([1e-5, 2e-5, 3e-5], U)
    assert chi == pytest.approx(U / (hbar * 6e-15), rel=1e-9)


def test_chi_overlap_matches_sum():
    hbar = 1.054571817e-34
    dV = 1e-6
    rho = [w / dV for w in (0.1, 0.4, 0.4, 0.1)]
    chi = becsq.mode_reduction.chi_overlap(rho, dV, 1e-45)
    assert chi == pytest.approx(1e-45 / hbar * sum(r * r for r in rho) * dV, rel=1e-9)
    with pytest.raises(becsq.BecsqError):
        becsq.mode_reduction.chi_overlap([1.0, 1.0], dV, 1e-45)


def test_depletion_sum_close_to_integral_for_large_box():
    p = becsq.bogoliubov.BogoliubovParams(chi_aa=2.67e-2, n_a=2e5, tau_hold=1e-3, extents=[600e-6], n_total=4e5,
                                          theta=math.pi / 4)
    s = becsq.bogoliubov.depletion_sum(p)
    i = becsq.bogoliubov.depletion_integral(p)
    assert s > 0.0 and i > 0.0
    assert i == pytest.approx(s, rel=0.1)


def test_twa_box_report_shape():
    rep = becsq.twa_box(points=[8], extents=[1e-5], n_total=2000.0, chi_aa=0.5, tau_hold=1e-3,
                        theta_grid=[0.0, 0.5], phi_grid=[0.0], trajectories=50, seed=3, workers=1)
    assert rep["kind"] == "twa_run"
    moments = rep["tables"]["moments"]
    assert len(moments["theta"]) == 2
    mean, _, _ = rep["summary"]["final_mean_Na"]
    assert mean > 0.0
    again = becsq.twa_box(points=[8], extents=[1e-5], n_total=2000.0, chi_aa=0.5, tau_hold=1e-3,
                          theta_grid=[0.0, 0.5], phi_grid=[0.0], trajectories=50, seed=3, workers=1)
    assert again["tables"]["moments"] == moments


def test_figure2_runs():
    assert "2" in becsq.figure_names
    rep = becsq.figure("2")
    value, _, unit = rep["summary"]["best_db_Na_phi0.1"]
    assert unit == "dB"
    assert value > 15.0
