import math

import numpy as np
import pytest

from osgoodlab.carleman import (CarlemanProbeConfig, TableRangeError,
                                WeightError, WeightOverflowError, build_Phi,
                                build_phi, build_weight_table, invert_phi,
                                probe_carleman, weight_table_report,
                                weight_value)
from osgoodlab.modulus import make_builtin


def test_build_rejects_convergent_modulus():
    with pytest.raises(WeightError):
        build_phi(make_builtin("sqrt"), 100.0)


def test_build_rejects_small_range():
    with pytest.raises(WeightError):
        build_phi(make_builtin("linear"), 1.5)


def test_phi_oracles_linear(wt_linear):
    # phi(t) = ln t in closed form
    assert float(wt_linear.phi(1.0)) == 0.0
    assert float(wt_linear.phi(math.e)) == pytest.approx(1.0, abs=1e-12)
    ts = np.exp(np.linspace(0.0, math.log(1000.0), 97))
    np.testing.assert_allclose(wt_linear.phi(ts), np.log(ts), atol=1e-10)


def test_phi_oracles_loglinear(wt_loglinear):
    # phi(t) = ln(1 + ln t) in closed form
    assert float(wt_loglinear.phi(math.e)) == pytest.approx(math.log(2.0),
                                                            abs=1e-9)
    ts = np.exp(np.linspace(0.0, math.log(1000.0), 97))
    np.testing.assert_allclose(wt_loglinear.phi(ts), np.log1p(np.log(ts)),
                               rtol=1e-8, atol=1e-10)


def test_invert_examples(wt_linear, wt_loglinear):
    assert invert_phi(wt_linear, 0.0) == 1.0
    assert invert_phi(wt_linear, 1.0) == pytest.approx(math.e, rel=1e-10)
    assert invert_phi(wt_loglinear, math.log(2.0)) == pytest.approx(
        math.e, rel=1e-9)
    with pytest.raises(TableRangeError):
        invert_phi(wt_linear, wt_linear.tau_max * 1.5)
    with pytest.raises(TableRangeError):
        invert_phi(wt_linear, -0.1)


def test_inverse_consistency(wt_linear, rng):
    for t in np.exp(rng.uniform(0.0, math.log(1000.0), 100)):
        tau = float(wt_linear.phi(t))
        assert invert_phi(wt_linear, tau) == pytest.approx(t, rel=1e-8)


def test_Phi_oracles_linear(wt_linear):
    # Phi(tau) = e^tau - 1 in closed form
    assert float(wt_linear.Phi(0.0)) == 0.0
    assert float(wt_linear.Phi(1.0)) == pytest.approx(math.e - 1.0, rel=1e-9)
    tau = np.linspace(0.0, wt_linear.tau_max, 301)
    np.testing.assert_allclose(wt_linear.Phi(tau), np.exp(tau) - 1.0,
                               rtol=1e-7, atol=1e-9)


def test_curvature_identity_closed_form(wt_linear):
    # at tau = 1 both sides equal e
    assert float(wt_linear.Phi2(1.0)) == pytest.approx(math.e, rel=1e-9)
    p1 = float(wt_linear.Phi1(1.0))
    assert p1**2 * (1.0 / p1) == pytest.approx(math.e, rel=1e-9)


def test_loglinear_phi_inverse_closed_form(wt_loglinear):
    tau = np.linspace(0.0, wt_loglinear.tau_max, 301)
    oracle = np.exp(np.exp(tau) - 1.0)
    np.testing.assert_allclose(wt_loglinear.phi_inverse(tau), oracle,
                               rtol=1e-8)


@pytest.mark.parametrize("fixture", ["wt_linear", "wt_loglinear"])
def test_table_report_passes(fixture, request):
    wt = request.getfixturevalue(fixture)
    rep = weight_table_report(wt)
    assert rep.passed, rep.to_json()


def test_weight_values(wt_linear):
    assert weight_value(wt_linear, 2.0, 1.0, 1.0) == 1.0
    assert weight_value(wt_linear, 1.0, 1.0, 0.0) == pytest.approx(
        math.exp(2.0 * (math.e - 1.0)), rel=1e-8)
    assert weight_value(wt_linear, 2.0, 1.0, 0.5) == pytest.approx(
        math.exp(math.e - 1.0), rel=1e-8)
    # monotone decreasing in t
    ts = np.linspace(0.0, 0.5, 11)
    vals = [weight_value(wt_linear, 2.0, 1.0, float(t)) for t in ts]
    assert np.all(np.diff(vals) < 0.0)


def test_weight_error_kinds(wt_linear):
    # range miss and exponent overflow are distinct failures
    with pytest.raises(TableRangeError):
        weight_value(wt_linear, 100.0, 1.0, 0.0)
    # tau = 6.9 is inside the table but Phi(6.9) ~ 992 overflows exp
    with pytest.raises(WeightOverflowError):
        weight_value(wt_linear, 2.0, 3.45, 0.0)
    with pytest.raises(WeightError):
        weight_value(wt_linear, 2.0, 1.0, -0.5)


def test_phi_build_then_Phi_build_matches_wrapper():
    mu = make_builtin("linear")
    wt = build_Phi(build_phi(mu, 50.0))
    ww = build_weight_table(mu, 50.0)
    np.testing.assert_allclose(wt.Phi_nodes, ww.Phi_nodes, rtol=1e-12)


@pytest.fixture(scope="module")
def probe_table():
    cfg = CarlemanProbeConfig()
    t_max = math.exp(cfg.gamma_grid[-1] * cfg.T * 1.02)
    return build_weight_table(make_builtin("linear"), t_max)


def test_probe_zero_family(probe_table):
    rep = probe_carleman(CarlemanProbeConfig(test_family="zero"), probe_table)
    assert rep.trivial and rep.feasible
    assert rep.to_report().passed


def test_probe_sine_mode_monotone(probe_table):
    cfg = CarlemanProbeConfig(gamma_grid=(8.0, 16.0, 32.0))
    rep = probe_carleman(cfg, probe_table)
    assert rep.feasible
    assert np.all(np.diff(rep.ratios) > 0.0)
    assert rep.constant is not None and rep.constant > 0.0
    assert "consistent" in rep.statement and "prove" in rep.statement
    assert len(rep.ratios_gamma) == 3


def test_probe_time_constant_family(probe_table):
    cfg = CarlemanProbeConfig(test_family="time-constant",
                              gamma_grid=(8.0, 16.0, 32.0))
    rep = probe_carleman(cfg, probe_table)
    assert np.all(rep.ratios > 0.0)


def test_probe_variable_coefficients(probe_table):
    import math as _m
    from osgoodlab.dyadic import GridField
    N = 128
    x = 2.0 * _m.pi * np.arange(N) / N
    coeffs = [[GridField(1.0 + 0.3 * np.cos(x))]]
    cfg = CarlemanProbeConfig(gamma_grid=(8.0, 16.0, 32.0), resolution=N,
                              lambda0=0.5)
    rep = probe_carleman(cfg, probe_table, coeffs=coeffs)
    assert np.all(rep.ratios > 0.0)
    # coefficients below the ellipticity floor are rejected
    bad = [[GridField(0.3 * np.ones(N))]]
    with pytest.raises(WeightError):
        probe_carleman(CarlemanProbeConfig(gamma_grid=(8.0, 16.0),
                                           resolution=N, lambda0=1.0),
                       probe_table, coeffs=bad)


def test_probe_dim2(probe_table):
    cfg = CarlemanProbeConfig(gamma_grid=(8.0, 16.0, 32.0), resolution=64,
                              dim=2)
    rep = probe_carleman(cfg, probe_table)
    assert rep.feasible
    assert np.all(np.diff(rep.ratios) > 0.0)


def test_probe_rejects_short_table(wt_linear):
    cfg = CarlemanProbeConfig(T=1.0, gamma_grid=(64.0, 128.0))
    with pytest.raises(TableRangeError):
        probe_carleman(cfg, wt_linear)


def test_probe_config_validation():
    with pytest.raises(WeightError):
        CarlemanProbeConfig(gamma_grid=(16.0, 8.0))
    with pytest.raises(WeightError):
        CarlemanProbeConfig(T=-1.0)
    with pytest.raises(WeightError):
        CarlemanProbeConfig(time_nodes=10)
