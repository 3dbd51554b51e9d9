"""Airy-type functions and fundamental solutions of the (fractional) Airy equation.

Everything is expressed through one primitive,

    I(x; alpha) = int_0^inf cos(g x + g^alpha / alpha) dg ,

so that normalisation conventions are explicit prefactors:

* conventional Airy function     Ai(x)        = I(x; 3) / pi
* normalised ``Ai`` used here    airy_ai(x)   = I(x; 3) / sqrt(pi)
* generalised Airy function      Ai_alpha(x)  = I(x; alpha) / pi

The fundamental solution is ``g_alpha(t, x) = (alpha t)^(-1/alpha) Ai_alpha(x / (alpha t)^(1/alpha))``,
which has unit mass and at ``alpha = 3`` equals
``(3t)^(-1/3) airy_ai(x / (3t)^(1/3)) / sqrt(pi)``.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, optimize

from ._quadrature import oscillatory_tail, wynn_epsilon
from .errors import DomainError, RangeError, ToleranceError

AIRY_RANGE = 20.0
DEFAULT_TOL = 1e-10

# Maclaurin series is used on [-7, 5]; outside that window rounding in the
# series exceeds 1e-10 and the asymptotic expansions are already converged.
_SERIES_LO, _SERIES_HI = -6.25, 5.0

_C1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_C2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)


class Method(str, Enum):
    SERIES = "series"
    OSCILLATORY = "oscillatory_quadrature"
    ASYMPTOTIC = "asymptotic_tail"
    DAMPED = "damped_contour"


@dataclass(frozen=True)
class AiryEval:
    x: float
    value: float
    method: Method
    est_error: float


def _quad(func, a, b, tol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(func, a, b, epsabs=tol, epsrel=1e-14, limit=1000, **kw)


# --- the primitive I(x; alpha) ---------------------------------------------


def airy_integral_oscillatory(x, alpha, tol=1e-12):
    """``I(x; alpha)`` by stationary-phase aware splitting and an accelerated tail.

    Returns ``(value, error_estimate)``.
    """
    x = float(x)
    stationary = (-x) ** (1.0 / (alpha - 1.0)) if x < 0 else 0.0
    a = max(2.0 * stationary, 1.0)

    def phase(g):
        return g * x + g**alpha / alpha

    pts = [stationary] if 0 < stationary < a else None
    head, herr = _quad(lambda g: math.cos(phase(g)), 0.0, a, tol / 4, points=pts)
    tail, terr = oscillatory_tail(np.ones_like, phase, a, atol=tol / 4)
    return head + tail, herr + terr


def airy_integral_damped(x, alpha, tol=1e-12):
    """``I(x; alpha)`` along the ray ``g = r exp(i pi / (2 alpha))``.

    On that ray the phase term turns into the damping factor
    ``exp(-r^alpha / alpha)``, so the integral converges absolutely.  Rounding
    grows like ``exp(c |x|^(alpha/(alpha-1)))`` for negative ``x``; use this
    as an independent check for moderate ``|x|`` only.
    """
    x = float(x)
    th = math.pi / (2.0 * alpha)
    c, s = math.cos(th), math.sin(th)

    def re_part(r):
        # Re[e^{i th} exp(i x r e^{i th} - r^alpha/alpha)]
        mag = math.exp(-x * r * s - r**alpha / alpha)
        return mag * math.cos(th + x * r * c)

    val, err = _quad(re_part, 0.0, np.inf, tol)
    return val, err


def airy_integral_series(x, alpha, terms=400):
    """Power series of ``I(x; alpha)`` about ``x = 0`` (entire for ``alpha > 1``).

    Term ``n`` is ``Re[(i x)^n / n! * alpha^((n+1)/alpha - 1) Gamma((n+1)/alpha) e^{i pi (n+1)/(2 alpha)}]``.
    Cancellation limits this to moderate ``|x|``.
    """
    x = float(x)
    if alpha == 3.0:
        return math.pi * _ai_maclaurin(x)
    out = []
    for n in range(terms):
        if x == 0 and n > 0:
            break
        logmag = (
            (n * math.log(abs(x)) if n else 0.0)
            - math.lgamma(n + 1)
            + ((n + 1) / alpha - 1.0) * math.log(alpha)
            + math.lgamma((n + 1) / alpha)
        )
        ang = n * math.pi / 2.0 + (math.pi * (n + 1) / (2.0 * alpha)) + (math.pi * n if x < 0 else 0.0)
        term = math.exp(logmag) * math.cos(ang)
        out.append(term)
        if n > 10 and logmag < -40 and logmag < math.log(max(abs(sum(out)), 1e-300)) - 40:
            break
    return math.fsum(out)


_EPS = 2.0**-52


def _ai_maclaurin(x, with_error=False):
    """Conventional Ai by the two-series Maclaurin expansion.

    With ``with_error`` the rounding bound is returned too: term ``k`` comes
    from ``2k`` roundings of the recurrence and the sums are exact.
    """
    z = x**3
    tf, tg = 1.0, x
    sf, sg = [tf], [tg]
    bound = _C1 + _C2 * abs(x)
    for k in range(1, 400):
        tf *= z / ((3 * k - 1) * (3 * k))
        tg *= z / ((3 * k) * (3 * k + 1))
        sf.append(tf)
        sg.append(tg)
        bound += (2 * k + 1) * (_C1 * abs(tf) + _C2 * abs(tg))
        if abs(tf) + abs(tg) < 1e-34 * (1.0 + abs(sf[0])):
            break
    val = _C1 * math.fsum(sf) - _C2 * math.fsum(sg)
    if with_error:
        return val, bound * _EPS + 4 * _EPS * max(abs(val), 1.0)
    return val


def _u(k):
    return math.exp(math.lgamma(3 * k + 0.5) - k * math.log(54.0) - math.lgamma(k + 1) - math.lgamma(k + 0.5))


def _ai_asymptotic(x):
    """Conventional Ai by its large-|x| expansions.  Returns ``(value, error_bound)``."""
    if x > 0:
        z = (2.0 / 3.0) * x**1.5
        terms = []
        for k in range(80):
            t = (-1) ** k * _u(k) / z**k
            if terms and abs(t) > abs(terms[-1]):
                break
            terms.append(t)
        pref = math.exp(-z) / (2.0 * math.sqrt(math.pi) * x**0.25)
        return pref * math.fsum(terms), pref * (abs(terms[-1]) + 8 * _EPS * (1 + z))
    w = -x
    z = (2.0 / 3.0) * w**1.5
    p, q = [], []
    for k in range(40):
        a = (-1) ** k * _u(2 * k) / z ** (2 * k)
        b = (-1) ** k * _u(2 * k + 1) / z ** (2 * k + 1)
        if p and abs(a) > abs(p[-1]):
            break
        p.append(a)
        q.append(b)
    pref = 1.0 / (math.sqrt(math.pi) * w**0.25)
    val = pref * (math.sin(z + math.pi / 4) * math.fsum(p) - math.cos(z + math.pi / 4) * math.fsum(q))
    # the phase z carries a relative rounding of a few ulps
    return val, pref * (abs(p[-1]) + abs(q[-1]) + 8 * _EPS * (1 + z))


def _ai_classical(x):
    """Conventional Ai for any real ``x`` (no range check)."""
    if _SERIES_LO <= x <= _SERIES_HI:
        return _ai_maclaurin(x)
    return _ai_asymptotic(x)[0]


def airy_integral_reference(x):
    """``I(x; 3)`` by series on the central window and asymptotic expansions outside."""
    x = float(x)
    if _SERIES_LO <= x <= _SERIES_HI:
        return math.pi * _ai_maclaurin(x), Method.SERIES
    return math.pi * _ai_asymptotic(x)[0], Method.ASYMPTOTIC


def airy_integral(x, alpha=3.0, method="oscillatory"):
    """``I(x; alpha) = int_0^inf cos(g x + g^alpha/alpha) dg``.

    ``method`` is one of ``"oscillatory"`` (default), ``"damped"`` or
    ``"series"`` (for ``alpha = 3`` the series/asymptotic pair).
    """
    if not alpha > 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    if method == "oscillatory":
        return airy_integral_oscillatory(x, alpha)[0]
    if method == "damped":
        return airy_integral_damped(x, alpha)[0]
    if method == "series":
        if alpha == 3.0:
            return airy_integral_reference(x)[0]
        return airy_integral_series(x, alpha)
    raise ValueError(f"unknown method {method!r}")


# --- public evaluators -------------------------------------------------------


def airy_ai(x):
    """Airy function normalised as ``(1/sqrt(pi)) int_0^inf cos(a x + a^3/3) da``.

    This is ``sqrt(pi)`` times the conventional Ai.  Valid for ``|x| <= 20``
    with absolute error below ``1e-10``.
    """
    x = float(x)
    if not abs(x) <= AIRY_RANGE:
        raise RangeError(f"airy_ai supports |x| <= {AIRY_RANGE}, got {x}")
    if _SERIES_LO <= x <= _SERIES_HI:
        val, err = _ai_maclaurin(x, with_error=True)
        return AiryEval(x, math.sqrt(math.pi) * val, Method.SERIES, math.sqrt(math.pi) * err)
    val, err = _ai_asymptotic(x)
    return AiryEval(x, math.sqrt(math.pi) * val, Method.ASYMPTOTIC, math.sqrt(math.pi) * err)


def airy_ai_alpha(x, alpha, tol=DEFAULT_TOL):
    """Generalised Airy function ``Ai_alpha(x) = (1/pi) int_0^inf cos(g x + g^alpha/alpha) dg``."""
    if not alpha > 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    val, err = airy_integral_oscillatory(x, alpha, tol=tol * math.pi / 10)
    if err > tol * math.pi:
        raise ToleranceError("generalised Airy quadrature did not converge", residual=err / math.pi)
    return AiryEval(float(x), val / math.pi, Method.OSCILLATORY, err / math.pi)


def fundamental_solution(t, x, alpha=3.0, normalization="unit"):
    """Fundamental solution ``g_alpha(t, x)`` of ``u_t = D^alpha u``.

    ``normalization="unit"`` gives the unit-mass kernel
    ``(1/pi) int_0^inf cos(g x + g^alpha t) dg``.  ``"half"`` reproduces a
    ``1/(2 pi)`` prefactor on the same half-line integral, which has mass 1/2.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if not alpha > 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    scale = (alpha * t) ** (1.0 / alpha)
    val = airy_ai_alpha(x / scale, alpha).value / scale
    if normalization == "unit":
        return val
    if normalization == "half":
        return 0.5 * val
    raise ValueError(f"unknown normalization {normalization!r}")


def fundamental_solution_classical(t, x):
    """``g(t, x) = Ai(x / (3t)^(1/3)) / (sqrt(pi) (3t)^(1/3))`` with the normalised Ai of :func:`airy_ai`."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    s = (3.0 * t) ** (1.0 / 3.0)
    return airy_ai(x / s).value / (math.sqrt(math.pi) * s)


def fundamental_solution_direct(t, x, alpha=3.0):
    """``(1/pi) int_0^inf cos(l x + l^alpha t) dl`` evaluated without rescaling."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")

    def phase(g):
        return g * x + g**alpha * t

    st = (-x / (alpha * t)) ** (1.0 / (alpha - 1.0)) if x < 0 else 0.0
    a = max(2.0 * st, t ** (-1.0 / alpha))
    pts = [st] if 0 < st < a else None
    head, _ = _quad(lambda g: math.cos(phase(g)), 0.0, a, 1e-13, points=pts)
    tail, _ = oscillatory_tail(np.ones_like, phase, a, atol=1e-13)
    return (head + tail) / math.pi


# --- mass of the fundamental solution ---------------------------------------


def _endpoint_terms(alpha, jmax=12):
    """Coefficients ``(c_j, s_j)`` of the non-oscillating part of ``I(y; alpha)``.

    For large ``|y|`` the contribution of the endpoint ``g = 0`` is
    ``sum_j c_j(sign y) |y|^-s_j`` with ``s_j = j alpha + 1``.
    """
    out = []
    for j in range(1, jmax + 1):
        mag = (1.0 / alpha) ** j / math.factorial(j) * math.gamma(j * alpha + 1.0)
        s = j * alpha + 1.0
        pos = mag * math.cos(math.pi * j / 2.0 + math.pi * s / 2.0)
        neg = mag * math.cos(math.pi * j / 2.0 - math.pi * s / 2.0)
        out.append((pos, neg, s))
    return out


def _endpoint_part(y, alpha):
    """Non-oscillating asymptotic part of ``I(y; alpha)`` (optimally truncated)."""
    w = abs(y)
    total, prev = 0.0, math.inf
    for pos, neg, s in _endpoint_terms(alpha):
        term = (pos if y > 0 else neg) * w ** (-s)
        if abs(term) > prev and term != 0.0:
            break
        total += term
        if term != 0.0:
            prev = abs(term)
    return total


def _endpoint_tail(y0, alpha):
    """``int`` of :func:`_endpoint_part` from ``y0`` outward to ``sign(y0) inf``."""
    w = abs(y0)
    total, prev = 0.0, math.inf
    for pos, neg, s in _endpoint_terms(alpha):
        term = (pos if y0 > 0 else neg) * w ** (1.0 - s) / (s - 1.0)
        if abs(term) > prev and term != 0.0:
            break
        total += term
        if term != 0.0:
            prev = abs(term)
    return total


def fundamental_solution_mass(t, alpha=3.0, lobes=40):
    """``int_R g_alpha(t, x) dx`` over a truncated domain plus tail corrections.

    The central part ``|y| <= y0`` (in the self-similar variable) is
    integrated adaptively.  On the decaying side the remaining mass is the
    integral of the algebraic endpoint expansion.  On the oscillating side
    that expansion is subtracted, the remainder is integrated between
    consecutive zeros of ``g`` and the alternating lobe sums are
    extrapolated.  Returns ``(mass, error_estimate)``.
    """
    scale = (alpha * t) ** (1.0 / alpha)
    y_right, y_left = 40.0, 10.0

    def g(x):
        return fundamental_solution(t, x, alpha)

    central, cerr = _quad(g, -y_left * scale, y_right * scale, 1e-12, points=[0.0])
    right = _endpoint_tail(y_right, alpha) / math.pi
    left_smooth = _endpoint_tail(-y_left, alpha) / math.pi

    def osc(x):
        return g(x) - _endpoint_part(x / scale, alpha) / (math.pi * scale)

    # zeros of the oscillating part: stationary phase (1 - 1/alpha)|y|^(alpha/(alpha-1)) - pi/4
    c = 1.0 - 1.0 / alpha
    e = (alpha - 1.0) / alpha

    def y_at(ph):
        return -((ph / c) ** e)

    k = math.floor(c * y_left ** (1.0 / e) / math.pi - 0.75) + 1
    zeros = []
    while len(zeros) < lobes + 1:
        mid = math.pi * (k + 0.75)
        lo, hi = y_at(mid + 0.4 * math.pi) * scale, y_at(mid - 0.4 * math.pi) * scale
        flo, fhi = osc(lo), osc(hi)
        if flo * fhi < 0:
            zeros.append(optimize.brentq(osc, lo, hi, xtol=1e-15 * scale))
        k += 1
    gap, gerr = _quad(osc, zeros[0], -y_left * scale, 1e-13)
    pieces = [_quad(osc, zeros[i + 1], zeros[i], 1e-13)[0] for i in range(lobes)]
    sums = gap + np.cumsum(pieces)
    left, lerr = wynn_epsilon(sums[-24:])
    # each kernel value carries the Ai_alpha tolerance; it accumulates over the integrated span
    span = y_right - zeros[-1] / scale
    return central + right + left_smooth + left, cerr + gerr + lerr + DEFAULT_TOL * span
