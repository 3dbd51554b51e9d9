import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sps

from airyfield.errors import DomainError, RangeError
from airyfield.spectral import (
    SpectralModel,
    abs_moment,
    c_beta,
    covariance_eta,
    density,
    is_feasible,
)

# frozen with mpmath: 2 * int_0^inf cos(l) (1 + l^2)^(-3/2) dl = 2 K_1(1)
MATERN_34_AT_1 = 1.20381446039446914947508000307


def test_density_examples():
    assert density(SpectralModel.matern(1.0), 0.0) == 1.0
    assert density(SpectralModel.ornstein_uhlenbeck(math.sqrt(2 * math.pi)), 0.0) == pytest.approx(1.0, abs=1e-15)
    assert density(SpectralModel.fractional_ou(0.75), 1.0) == pytest.approx(0.5, abs=1e-15)


@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_density_is_even_and_nonnegative(lam):
    for m in (SpectralModel.matern(1.3), SpectralModel.ornstein_uhlenbeck(2.0), SpectralModel.fractional_ou(0.7)):
        if lam == 0 and m.family.value == "fractional_ou":
            continue
        a, b = density(m, lam), density(m, -lam)
        assert a == b and a >= 0


def test_tabulated_range_error(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("lambda,f\n0,1\n1,0.5\n2,0.1\n")
    m = SpectralModel.from_csv(path)
    assert density(m, 1.5) == pytest.approx(0.3)
    with pytest.raises(RangeError):
        density(m, 3.0)


def test_tabulated_rejects_bad_tables(tmp_path):
    with pytest.raises(DomainError):
        SpectralModel.tabulated([0.0, 2.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        SpectralModel.tabulated([0.0, 1.0], [1.0, -0.1])
    path = tmp_path / "bad.csv"
    path.write_text("0,1\n1,x\n")
    with pytest.raises(DomainError):
        SpectralModel.from_csv(path)


def test_missing_family_parameter():
    with pytest.raises(DomainError, match="matern_alpha"):
        SpectralModel(family="matern")
    with pytest.raises(DomainError):
        SpectralModel.fractional_ou(0.4)


@pytest.mark.parametrize("x", np.linspace(0.0, 10.0, 21))
def test_ou_covariance_closed_form(x):
    m = SpectralModel.ornstein_uhlenbeck(1.7)
    assert covariance_eta(m, x) == pytest.approx(1.7**2 / 2 * math.exp(-x), abs=1e-8)


def test_covariance_at_zero_is_mass():
    for m in (SpectralModel.matern(2.0), SpectralModel.fractional_ou(0.75), SpectralModel.ornstein_uhlenbeck(1.0)):
        assert covariance_eta(m, 0.0) == pytest.approx(abs_moment(m, 0.0), abs=1e-10)


def test_matern_closed_form_half_integer_order():
    # alpha = 1/2 gives order 1/2 where K is elementary: the exact covariance is pi e^{-|x|}
    m = SpectralModel.matern(0.5)
    for x in (0.3, 1.0, 2.5):
        printed = 1.0 / (math.sqrt(math.pi) * math.gamma(1.0)) * math.sqrt(x / 2) * math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        got = covariance_eta(m, x)
        assert got == pytest.approx(math.pi * math.exp(-x), abs=1e-9)
        assert got == pytest.approx(2 * math.pi * printed, abs=1e-9)


def test_matern_three_quarters():
    m = SpectralModel.matern(0.75)
    assert covariance_eta(m, 1.0) == pytest.approx(MATERN_34_AT_1, abs=1e-9)
    nu = 2 * 0.75 - 0.5
    bessel = 2 * math.sqrt(math.pi) / math.gamma(2 * 0.75) * 0.5**nu * sps.kv(nu, 1.0)
    assert covariance_eta(m, 1.0) == pytest.approx(bessel, abs=1e-9)


def test_abs_moments():
    m = SpectralModel.matern(2.0)
    assert abs_moment(m, 0.0) == pytest.approx(sps.beta(0.5, 3.5), rel=1e-12)
    ou = SpectralModel.ornstein_uhlenbeck(1.0)
    assert math.isfinite(abs_moment(ou, 0.5))
    assert abs_moment(ou, 2.0) == math.inf
    assert abs_moment(ou, 1.0) == math.inf
    f = SpectralModel.fractional_ou(0.75)
    assert abs_moment(f, 0.0) == pytest.approx(math.pi / math.sin(math.pi * 0.75), rel=1e-10)


def test_c_beta_matern_half():
    rep = c_beta(SpectralModel.matern(2.0), 0.5)
    assert rep.feasible
    assert rep.c_beta == pytest.approx(1.0, rel=1e-10)
    assert rep.c_beta_closed_form == pytest.approx(1.0, rel=1e-12)
    # the simplified printed value 1/(alpha-1) only agrees at alpha = 2
    rep3 = c_beta(SpectralModel.matern(3.0), 0.5)
    assert rep3.c_beta == pytest.approx((3.0 - 1.0) ** -0.5, rel=1e-10)
    assert rep3.c_beta_printed == pytest.approx(0.5)


def test_c_beta_feasibility_examples():
    assert c_beta(SpectralModel.matern(2.0), 1.0).feasible
    rep = c_beta(SpectralModel.fractional_ou(0.6), 0.25)
    assert not rep.feasible and rep.c_beta is None
    assert "lambda" in rep.moment_condition


@pytest.mark.parametrize("beta", [0.05, 0.1, 0.2, 0.3, 0.5, 0.8])
def test_c_beta_closed_form_agrees_matern(beta):
    m = SpectralModel.matern(2.5, sigma2=1.7)
    rep = c_beta(m, beta)
    assert rep.feasible
    assert rep.c_beta == pytest.approx(rep.c_beta_closed_form, rel=1e-6)


@pytest.mark.parametrize("beta", [0.02, 0.08, 0.15, 0.2])
def test_c_beta_closed_form_agrees_fou(beta):
    rep = c_beta(SpectralModel.fractional_ou(0.7), beta)
    assert rep.feasible
    assert rep.c_beta == pytest.approx(rep.c_beta_closed_form, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(1.2, 4.0))
def test_feasibility_is_monotone(b1, b2, alpha):
    lo, hi = sorted((b1, b2))
    for m in (SpectralModel.matern(1.5), SpectralModel.ornstein_uhlenbeck(1.0), SpectralModel.fractional_ou(0.8)):
        if is_feasible(m, hi, alpha):
            assert is_feasible(m, lo, alpha)


def test_point_masses():
    m = SpectralModel.point_masses([1.0, 2.0], [0.25, 0.5])
    assert m.total_mass == pytest.approx(0.75)
    assert covariance_eta(m, 1.0) == pytest.approx(0.25 * math.cos(1.0) + 0.5 * math.cos(2.0))
