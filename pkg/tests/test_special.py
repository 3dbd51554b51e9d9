import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airyfield import special
from airyfield.errors import DomainError, RangeError
from airyfield.special import (
    Method,
    airy_ai,
    airy_ai_alpha,
    airy_integral,
    fundamental_solution,
    fundamental_solution_classical,
    fundamental_solution_direct,
    fundamental_solution_mass,
)

# mpmath, 30 digits: sqrt(pi) 3^(-2/3) / Gamma(2/3)
AI0 = 0.629270841292952726758766136817
# conventional Ai'(0) = -3^(-1/3) / Gamma(1/3)
AIP0_CONV = -0.258819403792806798405183560189


def test_airy_ai_at_zero():
    r = airy_ai(0.0)
    assert r.value == pytest.approx(AI0, abs=1e-14)
    assert r.method is Method.SERIES
    # cross-check against direct oscillatory quadrature of the defining integral
    assert airy_integral(0.0, 3.0) / math.sqrt(math.pi) == pytest.approx(AI0, abs=1e-11)


def test_airy_ai_derivative_at_zero():
    h = 1e-5
    d = (airy_ai(h).value - airy_ai(-h).value) / (2 * h)
    assert d < 0
    assert d == pytest.approx(math.sqrt(math.pi) * AIP0_CONV, abs=1e-8)


def test_airy_ai_tail_decays_monotonically():
    vals = [airy_ai(x).value for x in np.linspace(2.0, 20.0, 50)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0


def test_airy_ai_range():
    with pytest.raises(RangeError):
        airy_ai(20.5)
    with pytest.raises(RangeError):
        airy_ai(-25.0)


@pytest.mark.parametrize("x", np.linspace(-20, 20, 41))
def test_airy_ai_matches_oscillatory_quadrature(x):
    r = airy_ai(x)
    q = airy_integral(x, 3.0, "oscillatory") / math.sqrt(math.pi)
    assert r.value == pytest.approx(q, abs=1e-10)
    assert r.est_error < 1e-10


def test_airy_alpha_at_zero():
    # Fresnel: int_0^inf cos(g^2/2) dg = sqrt(pi)/2
    assert airy_ai_alpha(0.0, 2.0).value == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), abs=1e-11)
    assert airy_ai_alpha(0.0, 3.0).value == pytest.approx(AI0 / math.sqrt(math.pi), abs=1e-11)


def test_airy_alpha_domain():
    with pytest.raises(DomainError):
        airy_ai_alpha(0.0, 1.0)


@pytest.mark.parametrize("alpha", [1.7, 2.0, 2.5, 3.0, 4.0])
@pytest.mark.parametrize("x", [-4.0, -1.0, 0.0, 0.7, 3.0])
def test_three_routes_agree(alpha, x):
    osc = airy_integral(x, alpha, "oscillatory")
    damped = airy_integral(x, alpha, "damped")
    series = special.airy_integral_series(x, alpha)
    assert osc == pytest.approx(damped, abs=1e-9)
    assert osc == pytest.approx(series, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-6, 6), st.floats(1.5, 4.0))
def test_value_bounded_by_damped_majorant(x, alpha):
    # |I(x; alpha)| <= int_0^inf exp(-r^alpha/alpha) dr along the rotated ray when x >= 0
    v = airy_ai_alpha(x, alpha).value
    assert math.isfinite(v)
    if x >= 0:
        bound = alpha ** (1 / alpha - 1) * math.gamma(1 / alpha) / math.pi
        assert abs(v) <= bound + 1e-12


def test_fundamental_solution_domain():
    with pytest.raises(DomainError):
        fundamental_solution(0.0, 1.0)
    with pytest.raises(DomainError):
        fundamental_solution(-1.0, 1.0)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 0.5, 2.0])
def test_fundamental_solution_forms_agree(t, x):
    g = fundamental_solution(t, x, 3.0)
    assert g == pytest.approx(fundamental_solution_classical(t, x), abs=1e-8)
    assert g == pytest.approx(fundamental_solution_direct(t, x, 3.0), abs=1e-8)


def test_fundamental_solution_scaling_example():
    lhs = fundamental_solution(8.0, 2.0) * 8.0 ** (1 / 3)
    rhs = fundamental_solution(1.0, 2.0 * 8.0 ** (-1 / 3))
    assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
def test_self_similarity(alpha):
    y = 0.8
    ref = None
    for t in (0.3, 1.0, 4.0):
        s = (alpha * t) ** (1 / alpha)
        v = fundamental_solution(t, y * s, alpha) * s
        ref = v if ref is None else ref
        assert v == pytest.approx(ref, abs=1e-9)


def test_half_normalisation():
    assert fundamental_solution(1.0, 0.3, 2.5, "half") == pytest.approx(0.5 * fundamental_solution(1.0, 0.3, 2.5))


def test_unit_mass_alpha3():
    m, err = fundamental_solution_mass(1.0, 3.0)
    assert m == pytest.approx(1.0, abs=1e-6)
    assert err < 1e-6
