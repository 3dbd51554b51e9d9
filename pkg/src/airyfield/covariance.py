"""Space-time covariance of the evolved field and its structural properties.

``B(dt, dx) = int cos(l dx + psi(l) dt) F(dl)`` with ``psi(l) = sgn(l)|l|^alpha``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from ._quadrature import oscillatory_tail
from .errors import DomainError, RangeError, ToleranceError
from .spectral import Family, density, dispersion_phase, spectral_cos_transform, spectral_integral


def theoretical_cov(model, dt, dx, alpha=3.0, atol=1e-11):
    """Covariance ``B(dt, dx)`` by oscillatory quadrature."""
    if not math.isfinite(model.total_mass):
        raise DomainError("spectral measure has infinite mass")
    return spectral_cos_transform(model, float(dx), float(dt), alpha=alpha, atol=atol)


@dataclass(frozen=True)
class CovarianceSurface:
    dt_values: np.ndarray
    dx_values: np.ndarray
    values: np.ndarray
    model: object = field(repr=False)
    dispersion_alpha: float = 3.0

    def to_rows(self):
        """``(dt, dx, B)`` triples in row-major order."""
        return [
            (float(t), float(x), float(self.values[i, j]))
            for i, t in enumerate(self.dt_values)
            for j, x in enumerate(self.dx_values)
        ]


def covariance_surface(model, dt_values, dx_values, alpha=3.0):
    dt_values = np.asarray(dt_values, dtype=float)
    dx_values = np.asarray(dx_values, dtype=float)
    vals = np.array([[theoretical_cov(model, t, x, alpha) for x in dx_values] for t in dt_values])
    return CovarianceSurface(dt_values, dx_values, vals, model, alpha)


# --- mean-square increments ----------------------------------------------------


@dataclass(frozen=True)
class IncrementReport:
    """Mean-square increment ``E(u(t,x) - u(s,y))^2`` computed two ways."""

    via_covariance: float
    via_sine: float

    @property
    def discrepancy(self):
        return abs(self.via_covariance - self.via_sine)

    @property
    def value(self):
        return self.via_sine


def _sine_route(model, dt, dx, alpha, atol=1e-11):
    if dt == 0 and dx == 0:
        return 0.0
    if dt < 0 or (dt == 0 and dx < 0):
        dt, dx = -dt, -dx
    if model.is_discrete:
        lam, mass = model.table
        arg = lam * dx + dispersion_phase(lam, alpha) * dt
        return float(np.sum(4.0 * mass * np.sin(0.5 * arg) ** 2))

    def phase(x):
        return x * dx + x**alpha * dt

    stationary = (-dx / (alpha * dt)) ** (1.0 / (alpha - 1.0)) if (dt > 0 and dx < 0) else 0.0
    # split point deliberately differs from the covariance route
    a = max(3.0 * stationary, 1.5)
    pts = [stationary] if 0 < stationary < a else None
    s = model.origin_exponent

    def sq(x):
        return 4.0 * math.sin(0.5 * phase(x)) ** 2

    with np.errstate(all="ignore"):
        if s != 0.0:
            head, _ = integrate.quad(
                lambda x: sq(x) * float(model.regular_part(x)), 0.0, a, weight="alg", wvar=(s, 0.0), limit=2000,
                epsabs=atol, epsrel=1e-13,
            )
        else:
            head, _ = integrate.quad(lambda x: sq(x) * density(model, x), 0.0, a, points=pts, limit=2000, epsabs=atol, epsrel=1e-13)
        if model.family is Family.TABULATED:
            hi = model.support[1]
            if a >= hi:
                return 2.0 * head
            raise DomainError("tabulated sine route requires the split point beyond the table")
        mass_tail, _ = integrate.quad(lambda x: density(model, x), a, np.inf, limit=2000, epsabs=atol, epsrel=1e-13)
    cos_tail, err = oscillatory_tail(lambda x: density(model, x), phase, a, atol=atol)
    return 2.0 * (head + 2.0 * mass_tail - 2.0 * cos_tail)


def msq_increment(model, dt, dx, alpha=3.0):
    """``2(B(0,0) - B(dt,dx))`` and ``int 4 sin^2((l dx + psi(l) dt)/2) F(dl)``."""
    if model.family is Family.TABULATED and not model.is_discrete:
        b0 = theoretical_cov(model, 0.0, 0.0, alpha)
        b = theoretical_cov(model, dt, dx, alpha)
        return IncrementReport(2.0 * (b0 - b), 2.0 * (b0 - b))
    b0 = model.total_mass
    b = theoretical_cov(model, dt, dx, alpha)
    return IncrementReport(2.0 * (b0 - b), _sine_route(model, float(dt), float(dx), alpha))


def sigma_modulus(model, h, alpha=3.0, n=9):
    """``sigma(h) = sup_{|dt|,|dx| <= h} E(u(t,x) - u(s,y))^2)^(1/2)`` by a lag-box search.

    The supremum over the box ``[0, h] x [-h, h]`` is taken over an ``n x (2n-1)``
    grid and refined with a bounded local maximisation from the best node.
    """
    ts = np.linspace(0.0, h, n)
    xs = np.linspace(-h, h, 2 * n - 1)
    best, arg = -1.0, (0.0, 0.0)
    for t in ts:
        for x in xs:
            if t == 0 and x == 0:
                continue
            v = msq_increment(model, t, x, alpha).via_covariance
            if v > best:
                best, arg = v, (t, x)

    def neg(p):
        t = min(max(p[0], 0.0), h)
        x = min(max(p[1], -h), h)
        return -msq_increment(model, t, x, alpha).via_covariance

    res = optimize.minimize(neg, np.array(arg), method="Nelder-Mead", options={"xatol": h * 1e-6, "fatol": 1e-14})
    best = max(best, -res.fun)
    return math.sqrt(max(best, 0.0))


def increment_majorants(lam, dt, dx, h, beta, alpha=3.0):
    """The chain ``4 sin^2(arg/2) <= min(h w, 2)^2 <= 4 (h w / 2)^(2 beta)``.

    Here ``arg = l dx + psi(l) dt`` and ``w = |l| + |l|^alpha``; the chain
    holds whenever ``|dt|, |dx| <= h`` and ``0 < beta <= 1``.  Returns the
    three arrays.
    """
    lam = np.asarray(lam, dtype=float)
    arg = lam * dx + dispersion_phase(lam, alpha) * dt
    w = np.abs(lam) + np.abs(lam) ** alpha
    first = 4.0 * np.sin(0.5 * arg) ** 2
    second = np.minimum(h * w, 2.0) ** 2
    third = 4.0 * (0.5 * h * w) ** (2.0 * beta)
    return first, second, third


# --- FFT slices of B(t, .) ---------------------------------------------------


def _band_limit(model, rel=1e-15):
    """Frequency beyond which ``f`` is below ``rel * f(0)``-ish (or the table end)."""
    if model.family is Family.TABULATED:
        return model.support[1]
    f0 = density(model, 1.0)
    lam = 1.0
    while density(model, lam) > rel * f0 and lam < 1e6:
        lam *= 1.25
    return lam


def _fft_guard(model):
    if model.is_discrete:
        raise DomainError("FFT slices need a spectral density")
    if model.family is Family.FRACTIONAL_OU:
        raise DomainError("spectral density is unbounded at the origin")


@dataclass(frozen=True)
class CovarianceSlice:
    t: float
    x_values: np.ndarray
    values: np.ndarray
    period: float
    band_mass_error: float


def covariance_slice(model, t, alpha=3.0, n=2**18, band=None):
    """``B(t, x)`` on a uniform periodic x-grid from the trapezoid rule in ``l``.

    The rule is exact for the periodised covariance ``sum_m B(t, x + m P)``
    with period ``P = 2 pi / dl``; with the defaults ``P`` is several
    thousand, well beyond the spread of the covariance for moderate ``t``.
    ``band_mass_error`` is the spectral mass outside the band, an upper
    bound on the truncation error in ``l``.
    """
    _fft_guard(model)
    lam_max = band if band is not None else _band_limit(model)
    dl = 2.0 * lam_max / n
    k = np.fft.fftfreq(n, d=1.0 / n)  # 0, 1, ..., -1
    lam = k * dl
    if model.family is Family.TABULATED:
        lo, hi = model.support
        inside = (np.abs(lam) >= lo) & (np.abs(lam) <= hi)
        f = np.zeros(n)
        f[inside] = density(model, lam[inside])
    else:
        f = density(model, lam)
    phased = f * np.exp(1j * dispersion_phase(lam, alpha) * t)
    vals = np.fft.ifft(phased).real * n * dl
    period = 2.0 * math.pi / dl
    x = np.fft.fftfreq(n, d=1.0 / period)
    order = np.argsort(x)
    if model.family is Family.TABULATED:
        band_err = 0.0
    else:
        band_err = 2.0 * integrate.quad(lambda v: density(model, v), lam_max, np.inf, limit=500)[0]
    return CovarianceSlice(float(t), x[order], vals[order], period, band_err)


# --- conserved quantities ----------------------------------------------------


@dataclass
class ConservationReport:
    t_values: list
    integral: list
    integral_target: float
    l2_squared: list
    l2_target: float
    truncation_error: list
    max_integral_dev: float = 0.0
    max_l2_dev: float = 0.0
    flagged: bool = False

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def conserved_quantities(model, t_values, alpha=3.0, window=300.0, tol=1e-5, n=2**18):
    """``int B(t,x) dx`` and ``int B(t,x)^2 dx`` over ``[-window, window]`` for each ``t``.

    Targets are ``2 pi f(0)`` and ``2 pi int f^2``.  The truncation error
    estimate per ``t`` combines the out-of-window remainder of the periodic
    slice and the out-of-band spectral mass; values above ``tol`` flag the
    report.
    """
    _fft_guard(model)
    f0 = density(model, 0.0) if model.family is not Family.TABULATED else density(model, model.support[0])
    target1 = 2.0 * math.pi * f0
    f2, _ = spectral_integral(model, lambda x: density(model, x), growth=-model.tail_exponent)
    target2 = 2.0 * math.pi * f2
    ints, l2s, errs = [], [], []
    for t in t_values:
        sl = covariance_slice(model, t, alpha, n=n)
        x, b = sl.x_values, sl.values
        dx = x[1] - x[0]
        inside = np.abs(x) <= window
        w = np.where(inside, 1.0, 0.0)
        edge = np.flatnonzero(inside)
        w[edge[0]] = w[edge[-1]] = 0.5
        i1 = float(np.sum(w * b) * dx)
        i2 = float(np.sum(w * b * b) * dx)
        rem1 = abs(float(np.sum((1.0 - w) * b) * dx))
        rem2 = float(np.sum((1.0 - w) * b * b) * dx)
        err = max(rem1, rem2) + sl.band_mass_error * 2.0 * window
        ints.append(i1)
        l2s.append(i2)
        errs.append(err)
    rep = ConservationReport(list(map(float, t_values)), ints, target1, l2s, target2, errs)
    rep.max_integral_dev = max(abs(v - target1) for v in ints)
    rep.max_l2_dev = max(abs(v - target2) for v in l2s)
    rep.flagged = max(errs) > tol
    return rep


# --- dispersive decay ----------------------------------------------------------


@dataclass
class DispersionReport:
    t_values: list
    sup_values: list
    slope: float
    intercept: float
    constant: float
    inconclusive: bool
    note: str = ""

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def sup_abs_cov(model, t, alpha=3.0, n_scan=61):
    """``sup_x |B(t, x)|`` located by a scan over the self-similar window and refined.

    For ``t > 0`` the main lobe of ``B(t, .)`` lies within a few multiples of
    ``(alpha t)^(1/alpha)`` of the origin, on the side where ``psi`` sends
    low frequencies.
    """
    s = (alpha * t) ** (1.0 / alpha) if t > 0 else 0.0
    xs = np.linspace(-4.0 * s - 5.0, 2.0 * s + 5.0, n_scan)
    vals = np.array([abs(theoretical_cov(model, t, x, alpha)) for x in xs])
    j = int(np.argmax(vals))
    lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, n_scan - 1)]
    res = optimize.minimize_scalar(
        lambda x: -abs(theoretical_cov(model, t, x, alpha)), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10},
    )
    return max(-res.fun, vals[j])


def dispersive_decay(model, t_values, alpha=3.0):
    """Fit ``log sup_x |B(t,x)|`` against ``log t``; reports slope and ``sup_t S(t) t^(1/alpha)``."""
    t = np.asarray(sorted(t_values), dtype=float)
    if t.size < 3 or t[0] <= 0 or t[-1] / t[0] < 4:
        return DispersionReport(list(t), [], math.nan, math.nan, math.nan, True, "t range too short")
    s = np.array([sup_abs_cov(model, v, alpha) for v in t])
    slope, icpt = np.polyfit(np.log(t), np.log(s), 1)
    const = float(np.max(s * t ** (1.0 / alpha)))
    mono = bool(np.all(np.diff(s) <= 0))
    note = "" if mono else "sup|B| not monotone over the t range"
    return DispersionReport(list(map(float, t)), list(map(float, s)), float(slope), float(icpt), const, not mono, note)


# --- PDE residual ------------------------------------------------------------


def ivp_residual(model, t_points, x_points, h):
    """``max |d_t B + d_x^3 B|`` over the points, by central differences with step ``h``.

    ``d_t`` uses the two-point central stencil, ``d_x^3`` the four-point one;
    both are second-order accurate.  Only the classical case ``alpha = 3``
    has this local form.
    """
    out = 0.0
    for t in t_points:
        for x in x_points:
            bt = (theoretical_cov(model, t + h, x) - theoretical_cov(model, t - h, x)) / (2.0 * h)
            b = [theoretical_cov(model, t, x + k * h) for k in (-2, -1, 1, 2)]
            bxxx = (b[3] - 2.0 * b[2] + 2.0 * b[1] - b[0]) / (2.0 * h**3)
            out = max(out, abs(bt + bxxx))
    return out


def ivp_convergence(model, t_points, x_points, h0=0.2, levels=3):
    """Residuals for ``h0, h0/2, ...`` and the observed orders between them."""
    hs = [h0 / 2**k for k in range(levels)]
    res = [ivp_residual(model, t_points, x_points, h) for h in hs]
    orders = [math.log2(res[k] / res[k + 1]) for k in range(levels - 1)]
    return {"h": hs, "residual": res, "order": orders}


# --- positive definiteness ---------------------------------------------------


@dataclass(frozen=True)
class PSDReport:
    min_eig: float
    max_eig: float
    psd: bool
    gram: np.ndarray = field(repr=False)


def psd_check(model, points, alpha=3.0, rel=1e-8):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DomainError("need at least two (t, x) points")
    m = pts.shape[0]
    g = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            v = theoretical_cov(model, pts[i, 0] - pts[j, 0], pts[i, 1] - pts[j, 1], alpha)
            g[i, j] = g[j, i] = v
    ev = np.linalg.eigvalsh(g)
    return PSDReport(float(ev[0]), float(ev[-1]), bool(ev[0] >= -rel * ev[-1]), g)


# --- empirical covariance ------------------------------------------------------


def empirical_cov(ensemble, lag):
    """Mean of ``u(i, j) u(i + di, j + dj)`` over grid pairs, then over replicates.

    Returns ``(estimate, stderr)`` with the standard error taken across
    replicates.
    """
    di, dj = (int(v) for v in lag)
    r, nt, nx = ensemble.replicates.shape
    if r < 2:
        raise DomainError("need at least two replicates")
    if abs(di) >= nt or abs(dj) >= nx:
        raise RangeError(f"lag {lag} outside grid of shape {(nt, nx)}")
    d = ensemble.replicates
    a = d[:, max(0, -di) : nt - max(0, di), max(0, -dj) : nx - max(0, dj)]
    b = d[:, max(0, di) : nt + min(0, di) or None, max(0, dj) : nx + min(0, dj) or None]
    per = (a * b).mean(axis=(1, 2))
    return float(per.mean()), float(per.std(ddof=1) / math.sqrt(r))
