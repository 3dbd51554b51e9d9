"""phi-sub-Gaussian calculus and tail bounds for the supremum of the solution.

Bounds are evaluated in log space; the huge entropy prefactors for small
``beta`` overflow double precision long before the exponential term
brings the product back below one.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .errors import DomainError, InfeasibleBetaError, InvalidPhiError
from .spectral import c_beta as _c_beta


class PhiFamily(str, Enum):
    QUADRATIC = "quadratic"
    POWER = "power"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class PhiFunction:
    """Orlicz N-function.

    ``QUADRATIC`` is ``x^2/2``; ``POWER`` is ``|x|^alpha / alpha`` with
    ``1 < alpha <= 2``; ``NUMERIC`` wraps a user callable and is probed for
    the N-function properties on construction.
    """

    family: PhiFamily
    alpha: float | None = None
    evaluator: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        fam = PhiFamily(self.family)
        object.__setattr__(self, "family", fam)
        if fam is PhiFamily.POWER:
            if self.alpha is None or not 1.0 < self.alpha <= 2.0:
                raise DomainError(f"power phi needs alpha in (1, 2], got {self.alpha}")
        if fam is PhiFamily.NUMERIC:
            if not callable(self.evaluator):
                raise InvalidPhiError("numeric phi needs a callable evaluator")
            _probe_n_function(self.evaluator)

    @classmethod
    def quadratic(cls):
        return cls(PhiFamily.QUADRATIC)

    @classmethod
    def power(cls, alpha):
        return cls(PhiFamily.POWER, alpha=alpha)

    @classmethod
    def numeric(cls, func):
        return cls(PhiFamily.NUMERIC, evaluator=func)

    @property
    def gamma(self):
        """Conjugate exponent, ``1/alpha + 1/gamma = 1`` (power family)."""
        if self.family is PhiFamily.QUADRATIC:
            return 2.0
        if self.family is PhiFamily.POWER:
            return self.alpha / (self.alpha - 1.0)
        raise AttributeError("numeric phi has no conjugate exponent")

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        if self.family is PhiFamily.QUADRATIC:
            out = 0.5 * x * x
        elif self.family is PhiFamily.POWER:
            out = x**self.alpha / self.alpha
        else:
            out = np.vectorize(lambda v: float(self.evaluator(v)))(x)
        return float(out) if out.ndim == 0 else out

    def condition_q(self, k_max=20):
        """``liminf_{x -> 0} phi(x)/x^2 > 0``, probed on ``x = 2^-k``."""
        xs = 2.0 ** -np.arange(1, k_max + 1)
        r = np.asarray(self(xs)) / xs**2
        return bool(np.all(r > 0) and r[-1] >= 1e-3 * r[0])

    def describe(self):
        d = {"family": self.family.value}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def _probe_n_function(func, n=201, span=10.0):
    xs = np.linspace(-span, span, n)
    try:
        v = np.array([float(func(x)) for x in xs])
    except Exception as exc:  # noqa: BLE001 - any failure means not a usable phi
        raise InvalidPhiError(f"evaluator failed: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise InvalidPhiError("phi must be finite")
    if abs(float(func(0.0))) > 1e-14:
        raise InvalidPhiError("phi(0) must be 0")
    if np.max(np.abs(v - v[::-1])) > 1e-10 * (1.0 + np.max(np.abs(v))):
        raise InvalidPhiError("phi must be even")
    if np.any(v[xs != 0] <= 0):
        raise InvalidPhiError("phi must be positive away from 0")
    second = v[2:] - 2.0 * v[1:-1] + v[:-2]
    if np.any(second < -1e-9 * (1.0 + np.max(np.abs(v)))):
        raise InvalidPhiError("phi fails the convexity probe")
    try:
        big = float(func(1e6)) / 1e6
    except OverflowError:
        big = math.inf
    if not big > float(func(1.0)):
        raise InvalidPhiError("phi(x)/x must grow without bound")


def phi_star(phi, u):
    """Young-Fenchel transform ``sup_y (u y - phi(y))``."""
    u = abs(float(u))
    if phi.family is PhiFamily.QUADRATIC:
        return 0.5 * u * u
    if phi.family is PhiFamily.POWER:
        g = phi.gamma
        return u**g / g
    if u == 0.0:
        return 0.0

    def neg(y):
        return -(u * y - float(phi.evaluator(y)))

    hi = 1.0
    while -neg(hi) > 0 and hi < 1e12:
        hi *= 2.0
    # concave objective, so the bounded scalar search finds the global maximum
    res = optimize.minimize_scalar(neg, bounds=(0.0, hi), method="bounded", options={"xatol": 1e-12})
    return max(-res.fun, 0.0)


def rv_tail_bound(phi, tau, u):
    """``P{|zeta| > u} <= 2 exp(-phi*(u / tau))``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    if not u > 0:
        raise DomainError("u must be positive")
    return 2.0 * math.exp(-phi_star(phi, u / tau))


# --- bound context ---------------------------------------------------------------


@dataclass(frozen=True)
class BoundContext:
    """Ingredients of the supremum bounds on ``K = [a, b] x [c, d]``."""

    kappa: float
    c_eta: float
    c_beta: float
    beta: float
    eps0: float

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError("kappa must be nonnegative")
        if not self.c_eta > 0 or not self.c_beta > 0 or not self.eps0 > 0:
            raise DomainError("c_eta, c_beta and eps0 must be positive")
        if not 0.0 < self.beta <= 1.0:
            raise DomainError("beta must lie in (0, 1]")

    @property
    def theta_tilde(self):
        return sigma_tilde(self, self.kappa) / self.eps0 if self.kappa > 0 else 0.0

    def as_dict(self):
        return {
            "kappa": self.kappa,
            "c_eta": self.c_eta,
            "c_beta": self.c_beta,
            "beta": self.beta,
            "eps0": self.eps0,
            "theta_tilde": self.theta_tilde,
        }


def bound_context(model, beta, kappa, c_eta=1.0, dispersion_alpha=3.0):
    """Build a :class:`BoundContext`; ``eps0 = c_eta (F(R))^(1/2)``.

    Raises :class:`InfeasibleBetaError` naming the moment condition when
    ``c(beta)`` is infinite.
    """
    rep = _c_beta(model, beta, dispersion_alpha)
    if not rep.feasible:
        raise InfeasibleBetaError(f"beta={beta} violates the moment condition {rep.moment_condition}")
    eps0 = c_eta * math.sqrt(model.total_mass)
    return BoundContext(kappa=float(kappa), c_eta=float(c_eta), c_beta=rep.c_beta, beta=float(beta), eps0=eps0)


def sigma_tilde(ctx, h):
    """``c_eta c(beta) h^beta``."""
    if h < 0:
        raise DomainError("h must be nonnegative")
    return ctx.c_eta * ctx.c_beta * h**ctx.beta


class A1Variant(str, Enum):
    THM_GENERAL = "ThmGeneral"
    PAPER_ASUP = "PaperAsup"


def log_entropy_factor_a1(ctx, theta, variant=A1Variant.THM_GENERAL):
    variant = A1Variant(variant)
    b = ctx.beta
    lead = (4.0 / b - 1.0) * math.log(2.0)
    if ctx.kappa == 0:
        return lead
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if variant is A1Variant.THM_GENERAL:
        # c = c_eta c(beta) raised to 2/beta
        log_c = (2.0 / b) * math.log(ctx.c_eta * ctx.c_beta)
    else:
        log_c = 2.0 * math.log(ctx.c_eta) + (2.0 / b) * math.log(ctx.c_beta)
    inner = (
        2.0 * math.log(ctx.kappa)
        + log_c
        + (2.0 / b - 1.0) * math.log(4.0)
        - (2.0 / b) * math.log(theta * ctx.eps0)
    )
    return lead + float(np.logaddexp(inner, 0.0))


def entropy_factor_a1(ctx, theta, variant=A1Variant.THM_GENERAL):
    """Entropy factor ``A_1(theta eps0)``; ``variant`` selects how ``c_eta`` enters."""
    return math.exp(log_entropy_factor_a1(ctx, theta, variant))


# --- supremum bound ----------------------------------------------------------------


class GaussExponent(str, Enum):
    CONSISTENT = "consistent"  # v^2 (1-theta)^2 / (2 eps0^2)
    PRINTED = "printed"  # v^2 (1-theta)^2 / (2 eps0)


def _log_sup_bound(phi, ctx, v, theta, variant, gauss):
    if gauss is None:
        expo = phi_star(phi, v * (1.0 - theta) / ctx.eps0)
    elif GaussExponent(gauss) is GaussExponent.CONSISTENT:
        expo = v * v * (1.0 - theta) ** 2 / (2.0 * ctx.eps0**2)
    else:
        expo = v * v * (1.0 - theta) ** 2 / (2.0 * ctx.eps0)
    return math.log(2.0) - expo + log_entropy_factor_a1(ctx, theta, variant)


@dataclass(frozen=True)
class SupBoundEntry:
    v: float
    raw: float
    clipped: float
    theta: float
    a1: float
    log_raw: float


THETA_EDGE = 1e-4


def optimize_theta(objective, lo, hi, n_grid=201, tol=1e-8):
    """Minimise ``objective`` on ``[lo, hi]``: grid scan, then golden section on the best bracket."""
    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([objective(t) for t in grid])
    j = int(np.argmin(vals))
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]
    best_t, best_v = grid[j], vals[j]
    if b > a:
        res = optimize.minimize_scalar(objective, bounds=(a, b), method="bounded", options={"xatol": tol})
        if res.fun < best_v:
            best_t, best_v = float(res.x), float(res.fun)
    return float(best_t), float(best_v)


def sup_tail_bound(phi, ctx, v, theta=None, variant=A1Variant.THM_GENERAL, gauss=None):
    """Bound on ``P{sup_K |u| > v}``: ``2 exp(-phi*(v(1-theta)/eps0)) A_1(theta eps0)``.

    ``theta`` is optimised over ``[1e-4, min(theta_tilde, 1) - 1e-4]`` when
    omitted.  ``gauss`` replaces the ``phi*`` term by one of the two
    Gaussian exponents (``"consistent"`` or ``"printed"``).
    """
    if not v > 0:
        raise DomainError("v must be positive")
    if ctx.kappa == 0:
        lb = _log_sup_bound(phi, ctx, v, 0.0, variant, gauss)
        return _entry(v, lb, 0.0, ctx, variant)
    top = min(ctx.theta_tilde, 1.0)
    if theta is not None:
        if not 0.0 < theta < top:
            raise DomainError(f"theta must lie in (0, {top:.6g}), got {theta}")
        return _entry(v, _log_sup_bound(phi, ctx, v, theta, variant, gauss), theta, ctx, variant)
    lo, hi = THETA_EDGE, top - THETA_EDGE
    if hi <= lo:
        lo, hi = 0.25 * top, 0.75 * top
    t, lb = optimize_theta(lambda th: _log_sup_bound(phi, ctx, v, th, variant, gauss), lo, hi)
    return _entry(v, lb, t, ctx, variant)


def _entry(v, log_raw, theta, ctx, variant):
    raw = math.exp(log_raw) if log_raw < 700 else math.inf
    a1 = entropy_factor_a1(ctx, theta, variant) if (ctx.kappa == 0 or theta > 0) else math.nan
    return SupBoundEntry(float(v), raw, min(raw, 1.0), float(theta), a1, float(log_raw))


@dataclass
class SupBoundReport:
    v_values: np.ndarray
    bound_values: np.ndarray
    clipped_values: np.ndarray
    theta_used: np.ndarray
    a1: np.ndarray
    variant: A1Variant
    gauss: str | None = None

    def as_dict(self):
        return {
            "variant": A1Variant(self.variant).value,
            "gauss_exponent": self.gauss,
            "v": [float(v) for v in self.v_values],
            "bound_raw": [float(v) for v in self.bound_values],
            "bound_clipped": [float(v) for v in self.clipped_values],
            "theta": [float(v) for v in self.theta_used],
            "a1": [float(v) for v in self.a1],
        }


def sup_bound_report(phi, ctx, v_values, variant=A1Variant.THM_GENERAL, gauss=None):
    entries = [sup_tail_bound(phi, ctx, v, variant=variant, gauss=gauss) for v in v_values]
    return SupBoundReport(
        np.array([e.v for e in entries]),
        np.array([e.raw for e in entries]),
        np.array([e.clipped for e in entries]),
        np.array([e.theta for e in entries]),
        np.array([e.a1 for e in entries]),
        A1Variant(variant),
        None if gauss is None else GaussExponent(gauss).value,
    )


def gaussian_sup_bound(model, beta, kappa, v, exponent=GaussExponent.CONSISTENT, dispersion_alpha=3.0,
                       variant=A1Variant.PAPER_ASUP):
    """Gaussian special case: ``c_eta = 1``, ``eps0 = B_eta(0)^(1/2)``."""
    ctx = bound_context(model, beta, kappa, 1.0, dispersion_alpha)
    return sup_tail_bound(PhiFunction.quadratic(), ctx, v, variant=variant, gauss=exponent)


# --- increments ----------------------------------------------------------------------


def log_increment_tail_bound(phi, ctx, v, p, h):
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not h > 0:
        raise DomainError("h must be positive")
    if not v > 0:
        raise DomainError("v must be positive")
    b = ctx.beta
    arg = v * (1.0 - p) ** 2 / (sigma_tilde(ctx, h) * (3.0 - p))
    bracket = (4.0 / b - 2.0) * math.log(2.0) + 2.0 * math.log(ctx.kappa) - math.log(p) - 2.0 * math.log(h) if ctx.kappa > 0 else -math.inf
    return (4.0 / b) * math.log(2.0) - phi_star(phi, arg) + float(np.logaddexp(bracket, 0.0))


def increment_tail_bound(phi, ctx, v, p, h):
    """``2^(4/beta) exp(-phi*(v(1-p)^2 / (c_eta c(beta) h^beta (3-p)))) (2^(4/beta-2) kappa^2/(p h^2) + 1)``."""
    lb = log_increment_tail_bound(phi, ctx, v, p, h)
    return math.exp(lb) if lb < 700 else math.inf


# --- diagnostics -------------------------------------------------------------------------


@dataclass(frozen=True)
class MGFVerdict:
    passed: bool
    lambdas: np.ndarray
    empirical: np.ndarray
    envelope: np.ndarray
    slack: np.ndarray
    worst_margin: float


def moment_generating_check(sample, phi, tau, lambdas=None):
    """Compare the empirical MGF with ``exp(phi(tau lambda))``.

    Passes when ``mean(exp(l zeta)) <= exp(phi(tau l)) + 3 stderr`` for every
    ``l`` on the grid (default ``[-2, 2] / sd``).
    """
    z = np.asarray(sample, dtype=float)
    sd = float(z.std()) or 1.0
    if lambdas is None:
        lambdas = np.linspace(-2.0, 2.0, 41) / sd
    lambdas = np.asarray(lambdas, dtype=float)
    ez = np.exp(np.multiply.outer(lambdas, z))
    emp = ez.mean(axis=1)
    se = ez.std(axis=1) / math.sqrt(z.size)
    env = np.exp(np.asarray(phi(tau * lambdas)))
    margin = env + 3.0 * se - emp
    return MGFVerdict(bool(np.all(margin >= 0)), lambdas, emp, env, 3.0 * se, float(margin.min()))
