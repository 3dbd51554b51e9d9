"""Oscillatory quadrature primitives.

Integrals of the form ``int_a^inf A(x) cos(P(x)) dx`` with a monotone phase
``P`` are split at the points where ``P`` crosses consecutive multiples of
pi.  Each half-period piece is integrated with composite Gauss-Legendre and
the resulting alternating partial sums are accelerated with Wynn's epsilon
algorithm.
"""

import math

import numpy as np

from .errors import ToleranceError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def wynn_epsilon(partial_sums):
    """Extrapolate the limit of a sequence with Wynn's epsilon algorithm.

    Returns ``(estimate, error)`` where ``error`` is the difference between
    the two most accurate even-column entries.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size < 3:
        return float(s[-1]), math.inf
    prev = np.zeros(s.size + 1)
    cur = s.copy()
    best = [float(cur[-1])]
    col = 0
    while cur.size > 1:
        diff = np.diff(cur)
        if np.any(diff == 0.0):
            break
        nxt = prev[1:cur.size] + 1.0 / diff
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            best.append(float(cur[-1]))
            if not np.isfinite(best[-1]):
                best.pop()
                break
    if len(best) < 2:
        return best[-1], abs(float(s[-1] - s[-2]))
    return best[-1], abs(best[-1] - best[-2])


def solve_monotone(func, targets, lo, hi=None, iterations=64):
    """Solve ``func(x) = c`` for each ``c`` in ``targets`` with ``x >= lo``.

    ``func`` must be vectorised and nondecreasing on ``[lo, inf)``.
    """
    targets = np.asarray(targets, dtype=float)
    if hi is None:
        step = max(1.0, abs(lo))
        hi = lo + step
        top = targets.max()
        for _ in range(200):
            if func(np.array([hi]))[0] >= top:
                break
            step *= 2.0
            hi = lo + step
        else:
            raise ToleranceError("could not bracket phase level", residual=math.inf)
    a = np.full_like(targets, lo)
    b = np.full_like(targets, hi)
    for _ in range(iterations):
        m = 0.5 * (a + b)
        above = func(m) >= targets
        b = np.where(above, m, b)
        a = np.where(above, a, m)
    return 0.5 * (a + b)


def panel_integral(integrand, lo, hi):
    """Composite Gauss-Legendre on each ``[lo_i, hi_i]`` (vectorised).

    Panels whose endpoints differ by a large ratio are split geometrically so
    algebraically varying amplitudes stay resolved.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lo > 0, hi / lo, np.inf)
    nsub = int(np.clip(np.ceil(np.log2(np.nanmax(ratio))) if np.all(lo > 0) else 24, 1, 48))
    if nsub == 1:
        edges = np.stack([lo, hi], axis=-1)
    elif np.all(lo > 0):
        edges = np.exp(np.linspace(np.log(lo), np.log(hi), nsub + 1, axis=-1))
    else:
        edges = np.linspace(lo, hi, nsub + 1, axis=-1)
    left = edges[..., :-1, None]
    half = 0.5 * (edges[..., 1:, None] - left)
    x = left + half * (_GL_X + 1.0)
    vals = integrand(x) * (_GL_W * half)
    return vals.sum(axis=(-1, -2))


def oscillatory_tail(amp, phase, a, *, atol=1e-12, min_terms=40, max_terms=1 << 15):
    """Evaluate ``int_a^inf amp(x) cos(phase(x)) dx``.

    ``phase`` must increase to ``+inf`` on ``[a, inf)``; ``amp`` must be
    smooth there and the integral convergent (at least conditionally).
    Returns ``(value, error_estimate)``.
    """
    k0 = math.floor(phase(np.array([a]))[0] / math.pi) + 1

    def integrand(x):
        return amp(x) * np.cos(phase(x))

    n = min_terms
    last = None
    while True:
        levels = (k0 + np.arange(n + 1)) * math.pi
        nodes = solve_monotone(phase, levels, a)
        lo = np.concatenate(([a], nodes[:-1]))
        hi = nodes
        pieces = panel_integral(integrand, lo, hi)
        sums = np.cumsum(pieces)
        window = sums[-min(len(sums), 48):]
        est, err = wynn_epsilon(window)
        if last is not None:
            err = max(err, abs(est - last))
            if err <= atol:
                return est, err
        last = est
        n *= 2
        if n > max_terms:
            raise ToleranceError("oscillatory tail did not converge", residual=err)
