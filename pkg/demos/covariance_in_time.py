"""How the space-time covariance of the solution evolves.

The covariance at time lag t is the spectral cosine transform with the
dispersive phase added.  Its integral and L2 norm never change, while its
peak decays.  For a smooth initial covariance the decay only reaches the
t^(-1/3) rate slowly.

Run:  python demos/covariance_in_time.py
"""

import numpy as np

from airyfield.covariance import conserved_quantities, sup_abs_cov, theoretical_cov
from airyfield.spectral import SpectralModel

model = SpectralModel.matern(2.0)
print("Matern(2) initial data, total spectral mass", round(model.total_mass, 12))

print("\nB(t, x) on a small lag grid:")
xs = np.linspace(-4, 4, 9)
print("   t \\ x " + " ".join(f"{x:8.1f}" for x in xs))
for t in (0.0, 0.5, 2.0, 8.0):
    print(f"{t:8.1f} " + " ".join(f"{theoretical_cov(model, t, x):8.4f}" for x in xs))

print("\nConserved quantities (targets 2 pi f(0) and 2 pi int f^2):")
rep = conserved_quantities(model, [0.0, 1.0, 5.0])
for t, i1, i2 in zip(rep.t_values, rep.integral, rep.l2_squared):
    print(f"  t={t:4.1f}: int B = {i1:.10f} (target {rep.integral_target:.10f}),"
          f"  int B^2 = {i2:.10f} (target {rep.l2_target:.10f})")

print("\nPeak |B(t, .)| and local log-log slopes per decade:")
ts = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6]
sups = [sup_abs_cov(model, t) for t in ts]
for (t0, s0), (t1, s1) in zip(zip(ts, sups), zip(ts[1:], sups[1:])):
    print(f"  {t0:9.0e} -> {t1:9.0e}: slope {np.log(s1 / s0) / np.log(t1 / t0):+.4f}")
print("The slope creeps toward -1/3; the spectral curvature at the origin adds a")
print("relative correction of order (3t)^(-2/3), still visible over [10, 1000].")
