"""Spectral models of the stationary initial process.

A :class:`SpectralModel` holds an even spectral density ``f`` (or, for the
``atoms`` variant of tabulated models, a finite symmetric spectral measure).
Integrals against ``f`` are always folded onto the positive half-line,
``int_R w(|l|) f(l) dl = 2 int_0^inf w(l) f(l) dl``.
"""

import csv
import math
import warnings
from functools import cached_property
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate, special

from ._quadrature import oscillatory_tail, panel_integral, solve_monotone
from .errors import DomainError, RangeError, ToleranceError

DEFAULT_ATOL = 1e-11


class Family(str, Enum):
    MATERN = "matern"
    ORNSTEIN_UHLENBECK = "ou"
    FRACTIONAL_OU = "fractional_ou"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Spectral density of a stationary, centred, mean-square continuous process.

    Use the constructors :meth:`matern`, :meth:`ornstein_uhlenbeck`,
    :meth:`fractional_ou`, :meth:`tabulated` and :meth:`point_masses` rather
    than building the dataclass directly.

    Densities:

    * Matern:  ``sigma2 / (1 + l^2)^(2 alpha)``
    * OU:      ``gamma^2 / (2 pi (1 + l^2))``
    * fOU:     ``sigma2 |l|^(1 - 2H) / (1 + l^2)``
    * Tabulated: piecewise linear in ``|l|`` on the table range.  With
      ``atoms=True`` the table holds masses ``m_i`` and the measure is
      ``sum_i m_i (delta(l - l_i) + delta(l + l_i)) / 2``.
    """

    family: Family
    sigma2: float = 1.0
    matern_alpha: float | None = None
    ou_gamma: float | None = None
    hurst: float | None = None
    table: tuple | None = field(default=None, repr=False)
    atoms: bool = False

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam is Family.MATERN:
            _require(self.matern_alpha, "matern_alpha")
            if not self.matern_alpha > 0.25:
                # total mass finite iff 4 alpha > 1
                raise DomainError("matern_alpha must exceed 1/4 for a finite spectral mass")
            _positive(self.sigma2, "sigma2")
        elif fam is Family.ORNSTEIN_UHLENBECK:
            _require(self.ou_gamma, "ou_gamma")
            _positive(self.ou_gamma, "ou_gamma")
        elif fam is Family.FRACTIONAL_OU:
            _require(self.hurst, "hurst")
            if not 0.5 < self.hurst < 1.0:
                raise DomainError(f"hurst must lie in (1/2, 1), got {self.hurst}")
            _positive(self.sigma2, "sigma2")
        else:
            _require(self.table, "table")
            lam, val = (np.asarray(a, dtype=float) for a in self.table)
            if lam.ndim != 1 or lam.shape != val.shape or lam.size < 1:
                raise DomainError("table must be two equal-length 1-d arrays")
            if np.any(lam < 0):
                raise DomainError("tabulated frequencies must be nonnegative (the density is even)")
            if np.any(np.diff(lam) <= 0):
                raise DomainError("tabulated frequencies must be strictly increasing")
            if np.any(val < 0) or not np.all(np.isfinite(val)):
                raise DomainError("tabulated density values must be finite and nonnegative")
            if not self.atoms and lam.size < 2:
                raise DomainError("a tabulated density needs at least two nodes")
            lam.setflags(write=False)
            val.setflags(write=False)
            object.__setattr__(self, "table", (lam, val))

    # constructors -------------------------------------------------------

    @classmethod
    def matern(cls, alpha, sigma2=1.0):
        return cls(Family.MATERN, sigma2=sigma2, matern_alpha=alpha)

    @classmethod
    def ornstein_uhlenbeck(cls, gamma=1.0):
        return cls(Family.ORNSTEIN_UHLENBECK, ou_gamma=gamma)

    @classmethod
    def fractional_ou(cls, hurst, sigma2=1.0):
        return cls(Family.FRACTIONAL_OU, sigma2=sigma2, hurst=hurst)

    @classmethod
    def tabulated(cls, lam, f):
        return cls(Family.TABULATED, table=(lam, f))

    @classmethod
    def point_masses(cls, lam, mass):
        """Discrete symmetric measure; ``mass[i]`` is the total mass at ``+-lam[i]``."""
        return cls(Family.TABULATED, table=(np.atleast_1d(lam), np.atleast_1d(mass)), atoms=True)

    @classmethod
    def from_csv(cls, path, atoms=False):
        """Load a two-column ``lambda, f`` table.  A non-numeric header row is skipped."""
        lam, val = [], []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    a, b = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if lineno == 1:
                        continue
                    raise DomainError(f"{path}:{lineno}: expected two numeric columns")
                lam.append(a)
                val.append(b)
        if atoms:
            return cls.point_masses(lam, val)
        return cls.tabulated(lam, val)

    # structural facts ---------------------------------------------------

    @property
    def is_discrete(self):
        return self.family is Family.TABULATED and self.atoms

    @property
    def tail_exponent(self):
        """``p`` with ``f(l) ~ C l^-p`` as ``l -> inf``; ``inf`` for compact support."""
        if self.family is Family.MATERN:
            return 4.0 * self.matern_alpha
        if self.family is Family.ORNSTEIN_UHLENBECK:
            return 2.0
        if self.family is Family.FRACTIONAL_OU:
            return 1.0 + 2.0 * self.hurst
        return math.inf

    @property
    def origin_exponent(self):
        """``s`` with ``f(l) ~ C l^s`` as ``l -> 0+``."""
        if self.family is Family.FRACTIONAL_OU:
            return 1.0 - 2.0 * self.hurst
        return 0.0

    @property
    def support(self):
        if self.family is Family.TABULATED:
            lam = self.table[0]
            return float(lam[0]), float(lam[-1])
        return 0.0, math.inf

    @cached_property
    def total_mass(self):
        """``F(R) = B_eta(0)``, by quadrature."""
        return abs_moment(self, 0.0)

    def regular_part(self, lam):
        """``f(l) / l^s`` with ``s`` the origin exponent; smooth at zero."""
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.family is Family.FRACTIONAL_OU:
            return self.sigma2 / (1.0 + lam * lam)
        return density(self, lam)

    def describe(self):
        d = {"family": self.family.value}
        if self.family is Family.MATERN:
            d.update(sigma2=self.sigma2, matern_alpha=self.matern_alpha)
        elif self.family is Family.ORNSTEIN_UHLENBECK:
            d.update(ou_gamma=self.ou_gamma)
        elif self.family is Family.FRACTIONAL_OU:
            d.update(sigma2=self.sigma2, hurst=self.hurst)
        else:
            d.update(atoms=self.atoms, nodes=int(self.table[0].size))
        return d


def _require(value, name):
    if value is None:
        raise DomainError(f"missing required parameter '{name}'")


def _positive(value, name):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"'{name}' must be positive and finite, got {value}")


def density(model, lam):
    """Spectral density ``f(lam)``; vectorised, even in ``lam``.

    Raises :class:`RangeError` for tabulated models outside the table range.
    """
    scalar = np.ndim(lam) == 0
    x = np.abs(np.asarray(lam, dtype=float))
    fam = model.family
    if fam is Family.MATERN:
        out = model.sigma2 * (1.0 + x * x) ** (-2.0 * model.matern_alpha)
    elif fam is Family.ORNSTEIN_UHLENBECK:
        out = model.ou_gamma**2 / (2.0 * math.pi * (1.0 + x * x))
    elif fam is Family.FRACTIONAL_OU:
        with np.errstate(divide="ignore"):
            out = model.sigma2 * x ** (1.0 - 2.0 * model.hurst) / (1.0 + x * x)
    else:
        if model.atoms:
            raise DomainError("a discrete spectral measure has no density")
        lo, hi = model.support
        if np.any((x < lo) | (x > hi)):
            raise RangeError(f"|lambda| outside tabulated range [{lo}, {hi}]")
        out = np.interp(x, *model.table)
    return float(out) if scalar else out


# --- non-oscillatory spectral integrals ---------------------------------


def _quad(func, a, b, atol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, epsabs=atol, epsrel=1e-13, limit=2000, **kw)
    return val, err


def spectral_integral(model, weight, growth=0.0, atol=DEFAULT_ATOL):
    """``int_R weight(|l|) F(dl)`` for a nonnegative, non-oscillating weight.

    ``growth`` is the power ``q`` with ``weight(l) ~ l^q`` at infinity; it
    lets the tail be integrated exactly against its algebraic singularity
    after the substitution ``l = 1/u``.  Returns ``(value, error)``;
    ``value`` is ``inf`` when the integral diverges.
    """
    if model.is_discrete:
        lam, mass = model.table
        return float(np.sum(mass * weight(lam))), 0.0
    if model.family is Family.TABULATED:
        lam, _ = model.table
        val = panel_integral(lambda x: weight(x) * density(model, x), lam[:-1], lam[1:]).sum()
        return 2.0 * float(val), 0.0
    s = model.origin_exponent
    p = model.tail_exponent
    if growth - p >= -1.0:
        return math.inf, 0.0

    def reg(x):
        return weight(x) * model.regular_part(x)

    if s != 0.0:
        head, e1 = _quad(reg, 0.0, 1.0, atol / 4, weight="alg", wvar=(s, 0.0))
    else:
        head, e1 = _quad(reg, 0.0, 1.0, atol / 4)
    # tail: l = 1/u, integrand ~ u^(p - q - 2) near u = 0
    e = p - growth - 2.0

    def tail_reg(u):
        u = max(u, 1e-12)  # QAWS samples the endpoint; the regular part is continuous there
        lam_ = 1.0 / u
        return weight(lam_) * density(model, lam_) * u ** (-2.0 - e)

    tail, e2 = _quad(tail_reg, 0.0, 1.0, atol / 4, weight="alg", wvar=(e, 0.0))
    err = e1 + e2
    if err > 1e3 * atol * max(1.0, abs(head + tail)):
        raise ToleranceError("spectral integral did not converge", residual=err)
    return 2.0 * (head + tail), 2.0 * err


def abs_moment(model, p):
    """``int |l|^p F(dl)``; ``math.inf`` when the moment diverges."""
    if p < 0:
        raise DomainError("moment order must be nonnegative")
    if p - model.tail_exponent >= -1.0:
        return math.inf
    if p + model.origin_exponent <= -1.0:
        return math.inf
    val, _ = spectral_integral(model, lambda x: np.abs(x) ** p, growth=p)
    return val


# --- oscillatory cosine transform ----------------------------------------


def dispersion_phase(lam, alpha):
    """Evolution phase ``psi(l) = sgn(l)|l|^alpha`` (``l^3`` when alpha = 3)."""
    lam = np.asarray(lam, dtype=float)
    return np.sign(lam) * np.abs(lam) ** alpha


def spectral_cos_transform(model, dx, dt=0.0, alpha=3.0, atol=DEFAULT_ATOL, return_error=False):
    """``int cos(l dx + psi(l) dt) F(dl)`` with ``psi(l) = sgn(l)|l|^alpha``.

    This is the space-time covariance ``B(dt, dx)``; at ``dt = 0`` it is the
    covariance ``B_eta(dx)`` of the initial process.
    """
    if dt < 0 or (dt == 0 and dx < 0):
        dx, dt = -dx, -dt
    if model.is_discrete:
        lam, mass = model.table
        val = float(np.sum(mass * np.cos(lam * dx + dispersion_phase(lam, alpha) * dt)))
        return (val, 0.0) if return_error else val
    if dx == 0 and dt == 0:
        val, err = spectral_integral(model, np.ones_like, atol=atol)
        return (val, err) if return_error else val

    def phase(x):
        return x * dx + x**alpha * dt

    if model.family is Family.TABULATED:
        val, err = _tabulated_cos(model, phase)
    else:
        val, err = _continuous_cos(model, phase, dx, dt, alpha, atol)
    if err > 100 * atol:
        raise ToleranceError("covariance quadrature did not converge", residual=err)
    return (val, err) if return_error else val


def _continuous_cos(model, phase, dx, dt, alpha, atol):
    stationary = 0.0
    if dt > 0 and dx < 0:
        stationary = (-dx / (alpha * dt)) ** (1.0 / (alpha - 1.0))
    # keep the head short enough that it holds only a handful of oscillations
    def spread(x):
        return x * abs(dx) + x**alpha * dt

    a0 = 1.0
    if spread(1.0) > 20.0 * math.pi:
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if spread(mid) < 20.0 * math.pi else (lo, mid)
        a0 = hi
    a = max(1.5 * stationary, a0)
    s = model.origin_exponent
    pts = [stationary] if 0 < stationary < a else None

    def full(x):
        return math.cos(phase(x)) * density(model, x)

    if s != 0.0:
        b = min(a, 1.0)
        h1, e1 = _quad(lambda x: math.cos(phase(x)) * float(model.regular_part(x)), 0.0, b, atol / 4,
                       weight="alg", wvar=(s, 0.0))
        h2, e2 = _quad(full, b, a, atol / 4, points=pts if pts and pts[0] > b else None) if a > b else (0.0, 0.0)
        head, herr = h1 + h2, e1 + e2
    else:
        head, herr = _quad(full, 0.0, a, atol / 4, points=pts)
    tail, terr = oscillatory_tail(lambda x: density(model, x), phase, a, atol=atol / 4)
    return 2.0 * (head + tail), 2.0 * (herr + terr)


def _tabulated_cos(model, phase, max_pieces=400_000):
    lam, _ = model.table
    lo, hi = lam[0], lam[-1]
    grid = np.linspace(lo, hi, 4097)
    ph = phase(grid)
    # phase may be non-monotone below the stationary point; split there
    k = np.argmin(ph)
    breaks = [lam]
    for seg_lo, seg_hi, sign in ((lo, grid[k], -1.0), (grid[k], hi, 1.0)):
        if seg_hi <= seg_lo:
            continue
        p_lo, p_hi = sorted((phase(np.array([seg_lo]))[0], phase(np.array([seg_hi]))[0]))
        n = int(np.floor(p_hi / math.pi) - np.ceil(p_lo / math.pi)) + 1
        if n > max_pieces:
            raise ToleranceError("too many oscillations over the tabulated support", residual=math.inf)
        if n <= 0:
            continue
        levels = np.ceil(p_lo / math.pi) * math.pi + math.pi * np.arange(n)
        if sign > 0:
            roots = solve_monotone(phase, levels, seg_lo, seg_hi)
        else:
            roots = solve_monotone(lambda x: -phase(x), -levels, seg_lo, seg_hi)
        breaks.append(roots)
    edges = np.unique(np.concatenate(breaks + [np.array([grid[k]])]))
    edges = edges[(edges >= lo) & (edges <= hi)]
    val = panel_integral(lambda x: np.cos(phase(x)) * density(model, x), edges[:-1], edges[1:]).sum()
    return 2.0 * float(val), 0.0


def covariance_eta(model, x, atol=DEFAULT_ATOL):
    """Covariance of the initial process, ``B_eta(x) = int cos(l x) F(dl)``."""
    return spectral_cos_transform(model, float(x), 0.0, atol=atol)


# --- Hoelder exponents and the modulus constant ---------------------------


@dataclass
class HolderReport:
    """Outcome of :func:`c_beta`.

    ``c_beta`` is the quadrature value (``None`` when infeasible);
    ``c_beta_closed_form`` is the Beta-function value where one exists.
    ``c_beta_printed`` carries the simplified value printed for the Matern
    example at ``beta = 1/2`` so that the two can be compared.
    """

    beta: float
    dispersion_alpha: float
    feasible: bool
    c_beta: float | None = None
    c_beta_closed_form: float | None = None
    c_beta_printed: float | None = None
    truncated: bool = False
    moment_condition: str = ""


def moment_condition(model, beta, dispersion_alpha):
    """Human readable statement of the moment condition for ``beta``."""
    order = 2.0 * dispersion_alpha * beta
    return f"int |lambda|^{order:g} F(dlambda) < inf"


def is_feasible(model, beta, dispersion_alpha):
    """Moment condition ``int |l|^(2 alpha beta) F(dl) < inf`` by tail-exponent comparison."""
    return 2.0 * dispersion_alpha * beta - model.tail_exponent < -1.0


def c_beta(model, beta, dispersion_alpha=3.0):
    """Modulus constant ``c(beta) = 2^(1-beta) (int (|l| + |l|^alpha)^(2 beta) F(dl))^(1/2)``."""
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    if not dispersion_alpha > 1.0:
        raise DomainError(f"dispersion alpha must exceed 1, got {dispersion_alpha}")
    rep = HolderReport(
        beta=beta,
        dispersion_alpha=dispersion_alpha,
        feasible=is_feasible(model, beta, dispersion_alpha),
        truncated=model.family is Family.TABULATED,
        moment_condition=moment_condition(model, beta, dispersion_alpha),
    )
    if not rep.feasible:
        return rep
    al = dispersion_alpha
    moment, _ = spectral_integral(
        model, lambda x: (np.abs(x) + np.abs(x) ** al) ** (2.0 * beta), growth=2.0 * al * beta
    )
    rep.c_beta = 2.0 ** (1.0 - beta) * math.sqrt(moment)
    if al == 3.0:
        rep.c_beta_closed_form = _c_beta_beta_function(model, beta)
        if model.family is Family.MATERN and beta == 0.5 and model.matern_alpha > 1:
            rep.c_beta_printed = 1.0 / (model.matern_alpha - 1.0)
    return rep


def _c_beta_beta_function(model, beta):
    if model.family is Family.MATERN:
        s2, a = model.sigma2, model.matern_alpha
    elif model.family is Family.ORNSTEIN_UHLENBECK:
        s2, a = model.ou_gamma**2 / (2.0 * math.pi), 0.5
    elif model.family is Family.FRACTIONAL_OU:
        h = model.hurst
        return 2.0 ** (1.0 - beta) * math.sqrt(model.sigma2 * special.beta(beta + 1.0 - h, h - 3.0 * beta))
    else:
        return None
    return 2.0 ** (1.0 - beta) * math.sqrt(s2 * special.beta(beta + 0.5, 2.0 * a - 3.0 * beta - 0.5))
