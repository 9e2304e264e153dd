"""
Planar squeezing and steering over time
=======================================

Scan the evolution time for N = 100 and watch three quantities: the
optimized Hillery-Zubairy product E_HZ at the best quadrature angle,
the squeezing ratio xi2_bar, and the plain product E_HZ.  Values below
1/2 for the optimized product signal steering; values below 1 for the
others signal entanglement or squeezing.
"""

import numpy as np

from bec_steering import ModelParams, optimize_over_t, scan_time

params = ModelParams(100, chi=1.0, k_const=-1.0)
scan = scan_time(params, np.linspace(1e-4, 0.03, 300), method="closed")

t = scan.column("t")
for name in ("e_hz_theta", "xi2_bar", "e_hz", "e_hz_t"):
    values = scan.column(name)
    i = int(np.argmin(values))
    print(f"{name:>10}: minimum {values[i]:.4f} at t = {t[i]:.5f}")

# E_HZ rises above 1 well before the transverse product E_HZ^t does.
e, e_t = scan.column("e_hz"), scan.column("e_hz_t")
print(f"E_HZ first exceeds 1 at t = {t[np.argmax(e > 1)]:.5f}")
if np.any(e_t > 1):
    print(f"E_HZ^t first exceeds 1 at t = {t[np.argmax(e_t > 1)]:.5f}")

# A bounded Brent search refines the grid optimum.
best = optimize_over_t(params, "e_hz_theta")
print(f"optimum: E={best.value:.5f} at t={best.t:.6f}, theta={best.theta:.4f}, "
      f"r={best.r:.4f}, E/r={best.ratio:.5f}")
print(f"two-way steering at the optimum: {best.report.steer_a_by_b and best.report.steer_b_by_a}")
