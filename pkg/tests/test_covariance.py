import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airyfield.covariance import (
    conserved_quantities,
    covariance_surface,
    dispersive_decay,
    empirical_cov,
    increment_majorants,
    ivp_convergence,
    msq_increment,
    psd_check,
    sup_abs_cov,
    theoretical_cov,
)
from airyfield.errors import DomainError, RangeError
from airyfield.simulation import SpaceTimeGrid, plan_synthesis, synthesize
from airyfield.spectral import SpectralModel, c_beta, covariance_eta, density

# mpmath quadosc of int_0^inf cos(l^3) / (pi (1 + l^2)) dl
OU_DT1 = 0.220506537328550823926658740916

OU = SpectralModel.ornstein_uhlenbeck(1.0)
MATERN2 = SpectralModel.matern(2.0)


def test_origin_is_total_mass():
    for m in (OU, MATERN2, SpectralModel.fractional_ou(0.7)):
        assert theoretical_cov(m, 0, 0) == pytest.approx(m.total_mass, abs=1e-10)


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 4.0, -2.0])
def test_time_marginal_is_initial_covariance(x):
    for m in (OU, MATERN2):
        assert theoretical_cov(m, 0.0, x) == pytest.approx(covariance_eta(m, x), abs=1e-8)


def test_ou_unit_time_lag():
    assert theoretical_cov(OU, 1.0, 0.0) == pytest.approx(OU_DT1, abs=1e-10)


def test_surface_invariants():
    dts = np.linspace(0, 2, 5)
    dxs = np.linspace(-3, 3, 7)
    surf = covariance_surface(MATERN2, dts, dxs)
    b0 = MATERN2.total_mass
    assert np.all(np.abs(surf.values) <= b0 + 1e-10)
    np.testing.assert_allclose(surf.values[0], [covariance_eta(MATERN2, x) for x in dxs], atol=1e-8)
    rows = surf.to_rows()
    assert len(rows) == 35 and rows[0][:2] == (0.0, -3.0)


def test_zero_increment():
    rep = msq_increment(MATERN2, 0.0, 0.0)
    assert rep.via_covariance == 0.0 and rep.via_sine == 0.0


@pytest.mark.parametrize("dt,dx", [(0.3, 0.0), (0.0, 0.7), (0.5, -1.2), (2.0, 1.0), (1.0, -4.0)])
def test_increment_two_routes(dt, dx):
    for m in (OU, MATERN2, SpectralModel.fractional_ou(0.7)):
        rep = msq_increment(m, dt, dx)
        assert rep.discrepancy < 1e-8


def test_single_atom_increment():
    lam0, mass = 1.4, 0.6
    m = SpectralModel.point_masses([lam0], [mass])
    for dt, dx in ((0.2, 0.3), (1.0, -0.5)):
        want = 4 * mass * math.sin((lam0 * dx + lam0**3 * dt) / 2) ** 2
        rep = msq_increment(m, dt, dx)
        assert rep.via_sine == pytest.approx(want, abs=1e-14)
        assert rep.via_covariance == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_increment_below_holder_majorant(beta):
    c = c_beta(MATERN2, beta).c_beta
    for dt, dx in ((0.1, 0.1), (0.5, -0.2), (1.0, 1.0), (0.01, -0.01)):
        h = max(abs(dt), abs(dx))
        assert msq_increment(MATERN2, dt, dx).value <= c**2 * h ** (2 * beta) + 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-50, 50),
    st.floats(1e-4, 3.0),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
    st.floats(0.01, 1.0),
    st.sampled_from([3.0, 2.5]),
)
def test_majorant_chain(lam, h, ft, fx, beta, alpha):
    first, second, third = increment_majorants(lam, ft * h, fx * h, h, beta, alpha)
    assert first <= second * (1 + 1e-12) + 1e-300
    assert second <= third * (1 + 1e-12) + 1e-300


def test_conservation_matern():
    rep = conserved_quantities(MATERN2, [0.0, 1.0, 5.0])
    assert not rep.flagged
    assert rep.max_integral_dev < 1e-5 and rep.max_l2_dev < 1e-5
    assert rep.integral_target == pytest.approx(2 * math.pi * density(MATERN2, 0.0), rel=1e-14)


def test_conservation_ou_integral():
    rep = conserved_quantities(OU, [0.0, 0.5])
    assert rep.integral_target == pytest.approx(1.0, abs=1e-14)
    for v, err in zip(rep.integral, rep.truncation_error):
        assert abs(v - 1.0) <= max(err, 1e-6)


def test_conservation_refuses_unbounded_density():
    with pytest.raises(DomainError):
        conserved_quantities(SpectralModel.fractional_ou(0.7), [0.0])


def test_sup_decreases_from_start():
    s0 = sup_abs_cov(MATERN2, 0.0)
    assert s0 == pytest.approx(MATERN2.total_mass, abs=1e-10)
    assert sup_abs_cov(MATERN2, 50.0) < s0


def test_dispersion_short_range_inconclusive():
    rep = dispersive_decay(MATERN2, [1.0, 2.0])
    assert rep.inconclusive and "short" in rep.note


def test_dispersion_constant_finite():
    rep = dispersive_decay(MATERN2, [10.0, 30.0, 100.0])
    assert math.isfinite(rep.constant) and rep.constant > 0
    assert rep.slope < 0


def test_ivp_residual_converges():
    out = ivp_convergence(MATERN2, [0.5, 1.0], [-0.5, 0.0, 0.7], h0=0.2, levels=3)
    assert all(o >= 1.0 for o in out["order"])
    assert out["residual"][-1] < out["residual"][0]


def test_psd_repeated_point():
    rep = psd_check(OU, [(0.3, 0.2), (0.3, 0.2)])
    assert abs(rep.min_eig) < 1e-12 and rep.psd
    np.testing.assert_allclose(np.diag(rep.gram), OU.total_mass, atol=1e-10)


def test_psd_random_points():
    pts = np.random.default_rng(1).random((25, 2))
    for m in (OU, MATERN2):
        rep = psd_check(m, pts)
        assert rep.psd
        np.testing.assert_allclose(np.diag(rep.gram), m.total_mass, atol=1e-10)


def test_psd_needs_two_points():
    with pytest.raises(DomainError):
        psd_check(OU, [(0.0, 0.0)])


@pytest.fixture(scope="module")
def matern_ensemble():
    plan = plan_synthesis(MATERN2, tol=1e-4, n_modes=256)
    return synthesize(plan, SpaceTimeGrid.rectangle(0, 1, 0, 1, 5, 5), 3000, seed=99)


def test_empirical_origin_lag(matern_ensemble):
    est, se = empirical_cov(matern_ensemble, (0, 0))
    assert abs(est - MATERN2.total_mass) < 3 * se


def test_empirical_lag_symmetry(matern_ensemble):
    assert empirical_cov(matern_ensemble, (1, 2)) == empirical_cov(matern_ensemble, (-1, -2))


def test_empirical_lag_out_of_range(matern_ensemble):
    with pytest.raises(RangeError):
        empirical_cov(matern_ensemble, (5, 0))


def test_empirical_single_atom():
    lam0, mass = 2.0, 0.8
    m = SpectralModel.point_masses([lam0], [mass])
    grid = SpaceTimeGrid.rectangle(0, 0.5, 0, 1, 3, 5)
    ens = synthesize(plan_synthesis(m), grid, 4000, seed=4)
    for lag in ((1, 1), (2, -3)):
        dt = lag[0] * 0.25
        dx = lag[1] * 0.25
        want = mass * math.cos(lam0 * dx + lam0**3 * dt)
        est, se = empirical_cov(ens, lag)
        assert abs(est - want) < 3 * se
