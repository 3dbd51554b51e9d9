"""Monte Carlo exceedance probabilities and empirical moduli of continuity."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import DomainError

Z95 = float(stats.norm.ppf(0.975))


def wilson_interval(k, n, z=Z95):
    """Wilson score interval for ``k`` successes out of ``n``."""
    if n <= 0:
        raise DomainError("n must be positive")
    p = k / n
    den = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    # clamp so rounding never pushes the limits past p itself
    return min(max(0.0, mid - half), p), max(min(1.0, mid + half), p)


@dataclass(frozen=True)
class ExceedanceEstimate:
    v: float
    p_hat: float
    ci_low: float
    ci_high: float
    n_reps: int

    def as_dict(self):
        return {"v": self.v, "p_hat": self.p_hat, "ci_low": self.ci_low, "ci_high": self.ci_high, "n_reps": self.n_reps}


def grid_sup(ensemble):
    """Per-replicate ``max |u|`` over all grid nodes."""
    d = ensemble.replicates
    return np.abs(d).reshape(d.shape[0], -1).max(axis=1)


def estimate_sup_exceedance(ensemble, v_grid):
    sups = grid_sup(ensemble)
    n = sups.size
    out = []
    for v in np.atleast_1d(np.asarray(v_grid, dtype=float)):
        k = int(np.count_nonzero(sups > v))
        lo, hi = wilson_interval(k, n)
        out.append(ExceedanceEstimate(float(v), k / n, lo, hi, n))
    return out


def empirical_modulus(ensemble, h_grid):
    """``(h, sigma_hat, stderr)`` rows; ``sigma_hat`` is the largest RMS increment over lags within ``h``.

    Lags are measured in the max metric on the grid; ``h`` below the grid
    resolution is skipped and reported in ``notes``.
    """
    d = ensemble.replicates
    t = ensemble.grid.t_values
    x = ensemble.grid.x_values
    nt, nx = t.size, x.size
    dt_step = t[1] - t[0] if nt > 1 else math.inf
    dx_step = x[1] - x[0] if nx > 1 else math.inf
    res = min(dt_step, dx_step)
    rows, notes = [], []
    cache = {}

    def msq(i, j):
        if (i, j) not in cache:
            a = d[:, max(0, -i) : nt - max(0, i), max(0, -j) : nx - max(0, j)]
            b = d[:, max(0, i) : nt + min(0, i) or None, max(0, j) : nx + min(0, j) or None]
            per = ((a - b) ** 2).mean(axis=(1, 2))
            cache[(i, j)] = (float(per.mean()), float(per.std(ddof=1) / math.sqrt(per.size)))
        return cache[(i, j)]

    for h in h_grid:
        if h < res * (1 - 1e-12):
            notes.append(f"h={h:g} below grid resolution {res:g}; skipped")
            continue
        it = min(int(math.floor(h / dt_step + 1e-9)), nt - 1) if nt > 1 else 0
        jx = min(int(math.floor(h / dx_step + 1e-9)), nx - 1) if nx > 1 else 0
        best, err = 0.0, 0.0
        for i in range(0, it + 1):
            for j in range(-jx, jx + 1):
                if i == 0 and j <= 0:
                    continue
                m, s = msq(i, j)
                if m > best:
                    best, err = m, s
        sig = math.sqrt(best)
        rows.append((float(h), sig, err / (2 * sig) if sig > 0 else 0.0))
    return rows, notes


@dataclass(frozen=True)
class CompareRow:
    v: float
    bound: float
    ci_high: float
    p_hat: float
    verdict: str


def compare_report(estimates, bound_values):
    """PASS when ``ci_high <= bound`` or the bound is vacuous (``>= 1``)."""
    bound_values = np.atleast_1d(np.asarray(bound_values, dtype=float))
    if len(estimates) != bound_values.size:
        raise DomainError("estimate and bound grids differ in length")
    rows = []
    for e, b in zip(estimates, bound_values):
        ok = b >= 1.0 or e.ci_high <= b
        rows.append(CompareRow(e.v, float(b), e.ci_high, e.p_hat, "PASS" if ok else "FAIL"))
    return rows


def resolution_floor(n_reps):
    """Wilson upper limit with zero exceedances: the smallest probability ``n_reps`` can certify."""
    return wilson_interval(0, n_reps)[1]


def resolvable_v_max(bound_fn, n_reps, v_lo, v_hi):
    """Largest ``v`` in ``[v_lo, v_hi]`` where ``bound_fn(v)`` is still at least the resolution floor."""
    floor = resolution_floor(n_reps)
    g = lambda v: math.log(max(bound_fn(v), 1e-300)) - math.log(floor)
    if g(v_hi) >= 0:
        return v_hi
    if g(v_lo) < 0:
        return v_lo
    return optimize.brentq(g, v_lo, v_hi, xtol=1e-6)
