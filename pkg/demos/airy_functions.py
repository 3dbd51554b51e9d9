"""Three ways to evaluate the Airy primitive, and why the kernel has unit mass.

Run:  python demos/airy_functions.py
"""

import math

import numpy as np

from airyfield.special import (
    airy_ai,
    airy_ai_alpha,
    airy_integral,
    airy_integral_series,
    fundamental_solution,
    fundamental_solution_mass,
)

print("The primitive I(x; alpha) = int_0^inf cos(g x + g^alpha / alpha) dg")
print("evaluated by oscillatory quadrature, by rotating the contour, and by power series:\n")
print(f"{'x':>6} {'oscillatory':>20} {'damped':>20} {'series':>20}")
for x in (-6.0, -2.0, 0.0, 1.5, 4.0):
    row = [airy_integral(x, 3.0, "oscillatory"), airy_integral(x, 3.0, "damped"), airy_integral_series(x, 3.0)]
    print(f"{x:6.1f} " + " ".join(f"{v:20.15f}" for v in row))

print("\nThis library's airy_ai carries a 1/sqrt(pi) prefactor, so it is sqrt(pi) times the usual Ai:")
r = airy_ai(0.0)
print(f"  airy_ai(0) = {r.value:.15f}  (method {r.method.value}, est. error {r.est_error:.1e})")
print(f"  sqrt(pi) 3^(-2/3) / Gamma(2/3) = {math.sqrt(math.pi) * 3 ** (-2 / 3) / math.gamma(2 / 3):.15f}")

print("\nThe generalised function Ai_alpha changes shape with the dispersion exponent:")
xs = np.linspace(-4, 2, 7)
for alpha in (2.0, 2.5, 3.0):
    vals = [airy_ai_alpha(x, alpha).value for x in xs]
    print(f"  alpha={alpha}: " + " ".join(f"{v:+.4f}" for v in vals))

print("\nThe fundamental solution g_alpha(t, .) spreads like (alpha t)^(1/alpha) and keeps unit mass.")
print("Its left tail oscillates with amplitude ~ |x|^(-(alpha-2)/(2(alpha-1))), which does not decay")
print("at all for alpha = 2, so the mass integral is summed lobe by lobe with sequence acceleration:")
for alpha in (2.0, 2.5, 3.0):
    m, err = fundamental_solution_mass(1.0, alpha)
    print(f"  alpha={alpha}: mass = {m:.12f}  (error estimate {err:.1e})")

print("\nSelf-similarity: s g(t, y s) is the same for every t when s = (3t)^(1/3).")
for t in (0.1, 1.0, 10.0):
    s = (3 * t) ** (1 / 3)
    print(f"  t={t:5.1f}:  s g(t, 0.5 s) = {s * fundamental_solution(t, 0.5 * s):.12f}")
