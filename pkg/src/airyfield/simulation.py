"""Spectral synthesis of the initial process and of the evolved field.

A replicate is the finite trigonometric sum

    u(t, x) = sum_k a_k (xi_k cos(l_k x + psi(l_k) t) + xi'_k sin(l_k x + psi(l_k) t))

with ``psi(l) = sgn(l)|l|^alpha`` and i.i.d. zero-mean unit-variance
coefficients.  Frequencies come from an equal-mass stratification of the
spectral measure on ``[0, lambda_max]``; by default each replicate draws its
frequency uniformly (in mass) inside every stratum, which makes the
replicate covariance an unbiased estimate of the truncated covariance.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, RangeError
from .spectral import Family, density, dispersion_phase
from . import special

COEFF_KINDS = ("gaussian", "rademacher", "uniform")
# tau_phi(xi) <= C (E xi^2)^(1/2) for quadratic phi
DETERMINING_CONSTANTS = {"gaussian": 1.0, "rademacher": 1.0, "uniform": 1.0}

BLOCK = 64
_MAGIC = b"AIRYFLD1"


@dataclass(frozen=True)
class SynthesisPlan:
    """Discretisation of the spectral measure used by :func:`synthesize`.

    ``mode_freqs`` are the stratum mass-midpoints; ``edges_mass`` holds the
    cumulative mass at the stratum boundaries, used for per-replicate
    jitter through ``inverse_cdf``.
    """

    lambda_max: float
    n_modes: int
    mode_freqs: np.ndarray
    mode_amps: np.ndarray
    dispersion_alpha: float
    total_mass: float
    kept_mass: float
    jitter: bool = True
    model: dict = field(default_factory=dict)
    inverse_cdf: object = field(default=None, repr=False, compare=False)

    @property
    def mass_deficit(self):
        return 1.0 - float(np.sum(self.mode_amps**2)) / self.total_mass

    def header(self):
        return {
            "lambda_max": self.lambda_max,
            "n_modes": self.n_modes,
            "dispersion_alpha": self.dispersion_alpha,
            "total_mass": self.total_mass,
            "kept_mass": self.kept_mass,
            "jitter": self.jitter,
            "model": self.model,
            "mode_freqs": [float(v) for v in self.mode_freqs],
            "mode_amps": [float(v) for v in self.mode_amps],
        }


@dataclass(frozen=True)
class SpaceTimeGrid:
    t_values: np.ndarray
    x_values: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.t_values, dtype=float))
        x = np.atleast_1d(np.asarray(self.x_values, dtype=float))
        object.__setattr__(self, "t_values", t)
        object.__setattr__(self, "x_values", x)
        if t.size == 0 or x.size == 0:
            raise DomainError("grid axes must be nonempty")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(x) <= 0):
            raise DomainError("grid axes must be strictly increasing")
        if t[0] < 0:
            raise DomainError("time axis must be nonnegative")

    @classmethod
    def rectangle(cls, a, b, c, d, nt, nx):
        """Uniform grid on ``K = [a, b] x [c, d]`` (a single node when an axis is degenerate)."""
        t = np.linspace(a, b, nt) if b > a else np.array([float(a)])
        x = np.linspace(c, d, nx) if d > c else np.array([float(c)])
        return cls(t, x)

    @property
    def kappa(self):
        """``max(b - a, d - c)``; absent extents count as zero."""
        return max(self.t_values[-1] - self.t_values[0], self.x_values[-1] - self.x_values[0])

    @property
    def shape(self):
        return self.t_values.size, self.x_values.size


@dataclass(frozen=True)
class FieldEnsemble:
    grid: SpaceTimeGrid
    replicates: np.ndarray
    master_seed: int
    coeff_kind: str
    plan: SynthesisPlan | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_reps(self):
        return self.replicates.shape[0]

    def save(self, path):
        """Write the binary container: magic, header length, JSON header, float64 LE payload."""
        head = {
            "shape": list(self.replicates.shape),
            "t_values": [float(v) for v in self.grid.t_values],
            "x_values": [float(v) for v in self.grid.x_values],
            "master_seed": int(self.master_seed),
            "coeff_kind": self.coeff_kind,
            "plan": self.plan.header() if self.plan is not None else None,
            "meta": self.meta,
        }
        blob = json.dumps(head, sort_keys=True).encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(len(blob).to_bytes(8, "little"))
            fh.write(blob)
            fh.write(np.ascontiguousarray(self.replicates, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            if fh.read(len(_MAGIC)) != _MAGIC:
                raise ValueError(f"{path} is not an ensemble container")
            n = int.from_bytes(fh.read(8), "little")
            head = json.loads(fh.read(n))
            data = np.frombuffer(fh.read(), dtype="<f8").reshape(head["shape"])
        grid = SpaceTimeGrid(head["t_values"], head["x_values"])
        plan = None
        if head["plan"] is not None:
            p = head["plan"]
            plan = SynthesisPlan(
                lambda_max=p["lambda_max"],
                n_modes=p["n_modes"],
                mode_freqs=np.array(p["mode_freqs"]),
                mode_amps=np.array(p["mode_amps"]),
                dispersion_alpha=p["dispersion_alpha"],
                total_mass=p["total_mass"],
                kept_mass=p["kept_mass"],
                jitter=False,
                model=p["model"],
            )
        return cls(grid, data.copy(), head["master_seed"], head["coeff_kind"], plan, head["meta"])


# --- planning -----------------------------------------------------------------


def _half_mass(model, lo, hi):
    """``int_lo^hi f`` on the positive half-line."""
    s = model.origin_exponent
    with np.errstate(all="ignore"):
        if lo == 0.0 and s != 0.0:
            val, _ = integrate.quad(model.regular_part, 0.0, hi, weight="alg", wvar=(s, 0.0), limit=500)
        else:
            val, _ = integrate.quad(lambda x: density(model, x), lo, hi, limit=500, epsabs=0.0, epsrel=1e-12)
    return val


def _cutoff(model, tol, total):
    """Smallest ``L`` (up to bisection accuracy) with ``2 int_L^inf f < tol * total``.

    The target is shrunk by 10% so the kept mass, which is integrated
    separately, still clears the tolerance.
    """
    if model.family is Family.TABULATED:
        return model.support[1]
    tol = 0.9 * tol

    def tail(lam):
        return 2.0 * _half_mass(model, lam, np.inf)

    hi = 1.0
    while tail(hi) >= tol * total:
        hi *= 2.0
    lo = 0.0 if hi == 1.0 else hi / 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if tail(mid) >= tol * total:
            lo = mid
        else:
            hi = mid
    return hi


def _inverse_cdf(model, lam_max, nodes=8192):
    """Monotone interpolant of ``l`` against cumulative positive-half mass on ``[0, lam_max]``."""
    lo = model.support[0]
    r = np.linspace(0.0, 1.0, nodes)
    # cluster nodes near the origin where fractional densities vary fastest
    grid = lo + (lam_max - lo) * r**2
    cells = np.array([_half_mass(model, a, b) for a, b in zip(grid[:-1], grid[1:])])
    cum = np.concatenate(([0.0], np.cumsum(cells)))
    keep = np.concatenate(([True], np.diff(cum) > 0))
    return PchipInterpolator(cum[keep], grid[keep]), float(cum[-1])


def plan_synthesis(model, tol=1e-3, n_modes=512, alpha=3.0, jitter=True):
    """Equal-mass stratification of the spectral measure on ``[0, lambda_max]``.

    ``lambda_max`` is chosen so that the discarded mass is below
    ``tol * total_mass``.  Discrete (atomic) tabulated measures are used
    as they are, one mode per atom.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if n_modes < 2:
        raise DomainError("n_modes must be at least 2")
    if not alpha > 1:
        raise DomainError("dispersion alpha must exceed 1")
    total = model.total_mass
    if not math.isfinite(total):
        raise DomainError("spectral measure has infinite mass")
    if model.is_discrete:
        lam, mass = model.table
        return SynthesisPlan(
            lambda_max=float(lam[-1]),
            n_modes=int(lam.size),
            mode_freqs=lam.copy(),
            mode_amps=np.sqrt(mass),
            dispersion_alpha=alpha,
            total_mass=total,
            kept_mass=total,
            jitter=False,
            model=model.describe(),
        )
    lam_max = _cutoff(model, tol, total)
    inv, half = _inverse_cdf(model, lam_max)
    kept = 2.0 * half
    mids = inv((np.arange(n_modes) + 0.5) * half / n_modes)
    amps = np.full(n_modes, math.sqrt(kept / n_modes))
    return SynthesisPlan(
        lambda_max=lam_max,
        n_modes=n_modes,
        mode_freqs=np.asarray(mids, dtype=float),
        mode_amps=amps,
        dispersion_alpha=alpha,
        total_mass=total,
        kept_mass=kept,
        jitter=jitter,
        model=model.describe(),
        inverse_cdf=(inv, half),
    )


# --- synthesis ---------------------------------------------------------------


def replicate_rng(seed, rep):
    """Counter-based generator owned by replicate ``rep``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _coefficients(rng, kind, n):
    if kind == "gaussian":
        return rng.standard_normal((2, n))
    if kind == "rademacher":
        return 2.0 * rng.integers(0, 2, size=(2, n)) - 1.0
    if kind == "uniform":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=(2, n))
    raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {COEFF_KINDS}")


@dataclass(frozen=True)
class ModeRealization:
    """Frequencies and weighted coefficients of one replicate; evaluates anywhere."""

    freqs: np.ndarray
    a: np.ndarray
    b: np.ndarray
    alpha: float

    def __call__(self, t, x):
        ph = np.multiply.outer(np.asarray(x, dtype=float), self.freqs)
        ph = ph + dispersion_phase(self.freqs, self.alpha) * t
        return np.cos(ph) @ self.a + np.sin(ph) @ self.b


def realization(plan, seed, rep, coeff_kind="gaussian"):
    """Draws of replicate ``rep``; identical to what :func:`synthesize` uses."""
    rng = replicate_rng(seed, rep)
    n = plan.n_modes
    if plan.jitter:
        inv, half = plan.inverse_cdf
        u = rng.random(n)
        freqs = np.asarray(inv((np.arange(n) + u) * half / n), dtype=float)
    else:
        freqs = plan.mode_freqs
    xi = _coefficients(rng, coeff_kind, n)
    return ModeRealization(freqs, plan.mode_amps * xi[0], plan.mode_amps * xi[1], plan.dispersion_alpha)


def _block(plan, grid, seed, coeff_kind, reps):
    draws = [realization(plan, seed, r, coeff_kind) for r in reps]
    lam = np.stack([d.freqs for d in draws])  # (B, n)
    a = np.stack([d.a for d in draws])
    b = np.stack([d.b for d in draws])
    psi = dispersion_phase(lam, plan.dispersion_alpha)
    ct = np.cos(psi[:, :, None] * grid.t_values)  # (B, n, nt)
    st = np.sin(psi[:, :, None] * grid.t_values)
    cx = np.cos(lam[:, :, None] * grid.x_values)  # (B, n, nx)
    sx = np.sin(lam[:, :, None] * grid.x_values)
    p = a[:, :, None] * ct + b[:, :, None] * st
    q = b[:, :, None] * ct - a[:, :, None] * st
    return np.matmul(p.transpose(0, 2, 1), cx) + np.matmul(q.transpose(0, 2, 1), sx)


def synthesize(plan, grid, n_reps, seed, coeff_kind="gaussian", workers=1):
    """Monte Carlo replicates of ``u`` on ``grid``; shape ``(n_reps, nt, nx)``.

    Replicate ``r`` depends only on ``(seed, r)``, so the result is
    bit-identical for any ``workers``.
    """
    if n_reps < 1:
        raise DomainError("n_reps must be positive")
    if coeff_kind not in COEFF_KINDS:
        raise ValueError(f"unknown coefficient kind {coeff_kind!r}; expected one of {COEFF_KINDS}")
    starts = range(0, n_reps, BLOCK)

    def job(s):
        return _block(plan, grid, seed, coeff_kind, range(s, min(s + BLOCK, n_reps)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]
    data = np.concatenate(parts, axis=0)
    return FieldEnsemble(grid, data, int(seed), coeff_kind, plan)


# --- convolution with the fundamental solution ----------------------------


@dataclass(frozen=True)
class ConvolutionResult:
    x_values: np.ndarray
    values: np.ndarray
    err_estimate: float
    flagged: bool


def _smooth_step(y, a, b):
    s = np.clip((y - a) / (b - a), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        f1 = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return f0 / (f0 + f1)


def _kernel_values(y, alpha):
    if alpha == 3.0:
        return np.array([special._ai_classical(v) for v in y])
    return np.array([special.airy_ai_alpha(v, alpha).value for v in y])


def _convolve(eta, t, x, alpha, margin, lam_top, pts_per_period):
    s = (alpha * t) ** (1.0 / alpha)
    y_star = (lam_top * s) ** (alpha - 1.0)
    y_left = 3.0 * y_star + margin
    y_right = 12.0 if alpha == 3.0 else 100.0
    fmax = max(y_left ** (1.0 / (alpha - 1.0)), 1.0) + lam_top * s
    dy = 2.0 * math.pi / (pts_per_period * fmax)
    y = np.arange(-y_left, y_right + dy / 2, dy)
    w = _smooth_step(y, -y_left, -0.4 * y_left) * _smooth_step(-y, -y_right, -0.7 * y_right)
    k = w * _kernel_values(y, alpha) * dy
    return np.array([k @ eta(np.subtract(xx, s * y)) for xx in np.atleast_1d(x)]), y.size


def convolution_check(plan, eta, t, x_values, tol=1e-4, max_nodes=200_000, margin=60.0):
    """``int g(t, x - y) eta(y) dy`` on a tapered, truncated domain.

    ``eta`` is a callable of ``x`` only (e.g. ``lambda x: rz(0.0, x)`` for a
    :class:`ModeRealization`).  Integration runs in the self-similar
    variable; the left window extends past the stationary points of the
    highest plan frequency and is closed by a smooth taper.  The error
    estimate compares against a run with a shorter window; results above
    ``tol`` (or needing more than ``max_nodes`` kernel samples) are flagged.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    alpha = plan.dispersion_alpha
    lam_top = float(np.max(plan.mode_freqs)) if plan.jitter is False else plan.lambda_max
    s = (alpha * t) ** (1.0 / alpha)
    need = (3.0 * (lam_top * s) ** (alpha - 1.0) + margin) * (
        max((3.0 * (lam_top * s) ** (alpha - 1.0) + margin) ** (1.0 / (alpha - 1.0)), 1.0) + lam_top * s
    )
    if need > max_nodes:
        x = np.atleast_1d(np.asarray(x_values, dtype=float))
        return ConvolutionResult(x, np.full(x.size, np.nan), math.inf, True)
    eta1 = eta
    fine, _ = _convolve(eta1, t, x_values, alpha, margin, lam_top, 8)
    coarse, _ = _convolve(eta1, t, x_values, alpha, 2.0 * margin / 3.0, lam_top, 6)
    err = float(np.max(np.abs(fine - coarse)))
    return ConvolutionResult(np.atleast_1d(np.asarray(x_values, dtype=float)), fine, err, err > tol)
