import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airyfield.bounds import (
    A1Variant,
    BoundContext,
    GaussExponent,
    PhiFunction,
    bound_context,
    entropy_factor_a1,
    gaussian_sup_bound,
    increment_tail_bound,
    moment_generating_check,
    phi_star,
    rv_tail_bound,
    sigma_tilde,
    sup_bound_report,
    sup_tail_bound,
)
from airyfield.errors import DomainError, InfeasibleBetaError, InvalidPhiError
from airyfield.spectral import SpectralModel, c_beta

QUAD = PhiFunction.quadratic()
NUMQ = PhiFunction.numeric(lambda x: 0.5 * x * x)
FAMILIES = [QUAD, PhiFunction.power(1.5), PhiFunction.power(1.2), NUMQ]


def test_phi_star_examples():
    assert phi_star(QUAD, 3.0) == 4.5
    p = PhiFunction.power(1.5)
    assert p.gamma == pytest.approx(3.0)
    assert 1 / p.alpha + 1 / p.gamma == pytest.approx(1.0, abs=1e-15)
    assert phi_star(p, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert phi_star(NUMQ, 3.0) == pytest.approx(4.5, abs=1e-8)


def test_invalid_numeric_phi():
    with pytest.raises(InvalidPhiError):
        PhiFunction.numeric(lambda x: -abs(x))
    with pytest.raises(InvalidPhiError):
        PhiFunction.numeric(lambda x: abs(x) ** 0.5)
    with pytest.raises(InvalidPhiError):
        PhiFunction.numeric(lambda x: x**2 + x)
    with pytest.raises(DomainError):
        PhiFunction.power(2.5)


def test_condition_q():
    assert QUAD.condition_q()
    assert PhiFunction.numeric(lambda x: math.cosh(x) - 1).condition_q()
    assert PhiFunction.power(1.5).condition_q()
    assert not PhiFunction.numeric(lambda x: x**4).condition_q()


@settings(max_examples=50, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20), st.sampled_from(range(len(FAMILIES))))
def test_young_inequality(x, y, k):
    phi = FAMILIES[k]
    assert x * y <= phi(x) + phi_star(phi, y) + 1e-9 * (1 + abs(x * y))


def test_young_inequality_grid():
    xs = np.linspace(-5, 5, 100)
    for phi in FAMILIES[:3]:
        star = np.array([phi_star(phi, y) for y in xs])
        lhs = np.multiply.outer(xs, xs)
        rhs = np.asarray(phi(xs))[:, None] + star[None, :]
        assert np.all(lhs <= rhs + 1e-12)


@pytest.mark.parametrize("k", range(len(FAMILIES)))
def test_phi_star_convex_and_zero(k):
    phi = FAMILIES[k]
    assert phi_star(phi, 0.0) == 0.0
    us = np.linspace(-4, 4, 41)
    v = np.array([phi_star(phi, u) for u in us])
    assert np.all(v[2:] - 2 * v[1:-1] + v[:-2] >= -1e-9)


def test_rv_tail_bound():
    assert rv_tail_bound(QUAD, 1.0, 1e-12) == pytest.approx(2.0)
    assert rv_tail_bound(QUAD, 1.0, 2.0) == pytest.approx(2 * math.exp(-2.0), rel=1e-15)
    p2 = PhiFunction.power(2.0)
    for u in (0.1, 1.0, 3.7):
        assert rv_tail_bound(p2, 1.3, u) == rv_tail_bound(QUAD, 1.3, u)


def make_ctx(c=1.0, beta=1.0, kappa=1.0, eps0=2.0, c_eta=1.0):
    return BoundContext(kappa=kappa, c_eta=c_eta, c_beta=c / c_eta, beta=beta, eps0=eps0)


def test_sigma_tilde():
    ctx = make_ctx(c=1.7, beta=1.0)
    assert sigma_tilde(ctx, 1.0) == pytest.approx(1.7)
    assert sigma_tilde(ctx, 0.3) == pytest.approx(1.7 * 0.3)


def test_sigma_tilde_ou_quarter():
    ou = SpectralModel.ornstein_uhlenbeck(1.0)
    ctx = bound_context(ou, 0.15, 1.0)
    want = c_beta(ou, 0.15).c_beta * 0.5**0.15
    assert sigma_tilde(ctx, 0.5) == pytest.approx(want, rel=1e-14)


def test_context_invariants():
    m = SpectralModel.matern(2.0)
    ctx = bound_context(m, 0.5, 1.0, c_eta=1.3)
    assert ctx.eps0 == pytest.approx(1.3 * math.sqrt(m.total_mass))
    assert ctx.theta_tilde == pytest.approx(1.3 * ctx.c_beta / ctx.eps0)


def test_infeasible_beta_names_condition():
    with pytest.raises(InfeasibleBetaError, match="lambda"):
        bound_context(SpectralModel.ornstein_uhlenbeck(1.0), 0.25, 1.0)


def test_a1_hand_value():
    ctx = make_ctx(c=1.0, beta=1.0, kappa=1.0, eps0=2.0)
    assert entropy_factor_a1(ctx, 0.5, A1Variant.THM_GENERAL) == pytest.approx(40.0, rel=1e-14)


def test_a1_variants_agree_at_beta_one():
    ctx = BoundContext(kappa=0.7, c_eta=1.0, c_beta=2.3, beta=1.0, eps0=1.1)
    for th in (0.1, 0.4, 0.9):
        assert entropy_factor_a1(ctx, th, "ThmGeneral") == pytest.approx(entropy_factor_a1(ctx, th, "PaperAsup"))


def test_a1_variants_differ_when_c_eta_not_one():
    ctx = BoundContext(kappa=1.0, c_eta=2.0, c_beta=1.0, beta=0.5, eps0=2.0)
    assert entropy_factor_a1(ctx, 0.3, "ThmGeneral") > entropy_factor_a1(ctx, 0.3, "PaperAsup")


def test_a1_decreasing_in_theta():
    ctx = make_ctx(beta=0.5)
    vals = [entropy_factor_a1(ctx, th) for th in np.linspace(0.05, 0.95, 19)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_a1_theta_domain():
    with pytest.raises(DomainError):
        entropy_factor_a1(make_ctx(), 1.0)


def test_degenerate_kappa():
    ctx = make_ctx(kappa=0.0, beta=0.5)
    e = sup_tail_bound(QUAD, ctx, 1.0)
    assert e.a1 == pytest.approx(2 ** (4 / 0.5 - 1))
    assert e.theta == 0.0


def test_sup_bound_small_v_is_twice_a1():
    ctx = make_ctx(c=1.0, beta=1.0, kappa=1.0, eps0=2.0)
    e = sup_tail_bound(QUAD, ctx, 1e-9, theta=0.25)
    assert e.raw == pytest.approx(2 * entropy_factor_a1(ctx, 0.25), rel=1e-12)
    assert e.clipped == 1.0


def test_power_exponent_term():
    p = PhiFunction.power(1.5)
    ctx = make_ctx(c=0.8, beta=1.0, eps0=1.6)
    v, th = 4.0, 0.3
    e = sup_tail_bound(p, ctx, v, theta=th)
    g = 3.0
    want = 2 * math.exp(-(v**g) * (1 - th) ** g / (g * ctx.eps0**g)) * entropy_factor_a1(ctx, th)
    assert e.raw == pytest.approx(want, rel=1e-12)


def test_gaussian_exponent_variants():
    m = SpectralModel.matern(2.0)
    eps0 = math.sqrt(m.total_mass)
    cons = gaussian_sup_bound(m, 0.5, 1.0, 3.0, GaussExponent.CONSISTENT)
    prin = gaussian_sup_bound(m, 0.5, 1.0, 3.0, GaussExponent.PRINTED)
    for e, d in ((cons, eps0**2), (prin, eps0)):
        ctx = bound_context(m, 0.5, 1.0)
        a1 = entropy_factor_a1(ctx, e.theta, A1Variant.PAPER_ASUP)
        assert e.raw == pytest.approx(2 * math.exp(-9.0 * (1 - e.theta) ** 2 / (2 * d)) * a1, rel=1e-10)
    # eps0 < 1 makes the printed exponent the weaker one
    assert prin.raw > cons.raw


def test_consistent_gauss_matches_quadratic_phi():
    ctx = bound_context(SpectralModel.matern(2.0), 0.5, 1.0)
    for v in (1.0, 5.0):
        a = sup_tail_bound(QUAD, ctx, v, theta=0.2)
        b = sup_tail_bound(QUAD, ctx, v, theta=0.2, gauss="consistent")
        assert a.raw == pytest.approx(b.raw, rel=1e-14)


def test_theta_optimizer_beats_grid():
    ctx = bound_context(SpectralModel.matern(2.0), 0.5, 1.0)
    top = min(ctx.theta_tilde, 1.0)
    for v in (2.0, 6.0, 12.0):
        best = sup_tail_bound(QUAD, ctx, v)
        for th in np.linspace(1e-3, top - 1e-3, 37):
            assert best.log_raw <= sup_tail_bound(QUAD, ctx, v, theta=th).log_raw + 1e-12


def test_theta_outside_range():
    ctx = bound_context(SpectralModel.matern(2.0), 0.5, 1.0)
    with pytest.raises(DomainError):
        sup_tail_bound(QUAD, ctx, 1.0, theta=min(ctx.theta_tilde, 1.0))


def test_report_nonincreasing():
    ctx = bound_context(SpectralModel.ornstein_uhlenbeck(1.0), 0.15, 1.0)
    rep = sup_bound_report(QUAD, ctx, np.linspace(0.5, 20, 40))
    assert np.all(np.diff(rep.bound_values) <= 0)
    assert np.all(rep.clipped_values <= 1.0)
    d = rep.as_dict()
    assert d["variant"] == "ThmGeneral" and len(d["bound_raw"]) == 40


def test_increment_bound_hand_value():
    ctx = make_ctx(c=1.0, beta=1.0, kappa=1.0)
    want = 16 * math.exp(-0.5 * (5 * 0.25 / 2.5) ** 2) * (4 / 0.5 + 1)
    assert increment_tail_bound(QUAD, ctx, 5.0, 0.5, 1.0) == pytest.approx(want, rel=1e-14)


def test_increment_bound_nonincreasing_in_v():
    ctx = make_ctx(c=1.0, beta=0.5)
    vals = [increment_tail_bound(QUAD, ctx, v, 0.5, 0.1) for v in np.linspace(0.1, 30, 60)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_increment_bound_domain():
    ctx = make_ctx()
    with pytest.raises(DomainError):
        increment_tail_bound(QUAD, ctx, 1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        increment_tail_bound(QUAD, ctx, 1.0, 0.5, 0.0)


def test_mgf_check():
    rng = np.random.default_rng(3)
    assert moment_generating_check(rng.standard_normal(20000), QUAD, 1.0).passed
    rad = 2.0 * rng.integers(0, 2, 20000) - 1.0
    assert moment_generating_check(rad, QUAD, 1.0).passed
    assert not moment_generating_check(rng.standard_normal(20000), QUAD, 0.3).passed
