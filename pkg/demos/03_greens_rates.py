"""Exterior Green's functions: convergence rates and level curves.

Re g vanishes on the bands and grows off them; e^{-Re g(0)} is the
guaranteed rate for solving Ax = b, and knowing the spectrum more precisely
(three bands instead of their two-band hull) buys a visibly better rate.
Level curves of e^{Re g} generalize Bernstein ellipses.
"""

import math

import numpy as np

from akhiezer import BandSystem, build_greens, level_curve, nu, re_g

two = BandSystem.from_endpoints([-2, -0.5, 0.5, 6])
three = BandSystem.from_endpoints([-2, -0.5, 0.5, 0.7, 5.8, 6])

ev2, ev3 = build_greens(two), build_greens(three)
print(f"two-band hull   {two}:  e^-Re g(0) = {math.exp(-re_g(ev2, 0.0)):.6f}")
print(f"three bands     {three}:  e^-Re g(0) = {math.exp(-re_g(ev3, 0.0)):.6f}")
print("(smaller factor = faster iteration; knowledge of the middle gap pays)")

# spectrum-aware rate: eigenvalues slightly off the bands slow things down
rng = np.random.default_rng(11)
lam = np.concatenate([np.linspace(a, b, 40) for a, b in three])
lam = lam + rng.normal(0, 0.003, lam.size)
print(f"\njittered spectrum: e^nu(0;A) two-band  = {math.exp(nu(ev2, 0.0, lam)):.4f}")
print(f"                   e^nu(0;A) three-band = {math.exp(nu(ev3, 0.0, lam)):.4f}")

# level curves: the multi-interval Bernstein analogs
print("\nlevel curves of e^{Re g} on the two-band system:")
for rho in (1.1, 1.5, 2.5):
    curves = level_curve(ev2, rho, resolution=150)
    pts = sum(len(c) for c in curves)
    ext = [
        (min(c[:, 0].min() for c in curves), max(c[:, 0].max() for c in curves)),
        (min(c[:, 1].min() for c in curves), max(c[:, 1].max() for c in curves)),
    ]
    print(f"  rho={rho}: {len(curves)} closed curve(s), {pts} vertices, "
          f"x range [{ext[0][0]:+.2f},{ext[0][1]:+.2f}], "
          f"y range [{ext[1][0]:+.2f},{ext[1][1]:+.2f}]")

np.savetxt(
    "level_curve_rho1.5.csv",
    np.vstack(level_curve(ev2, 1.5, resolution=150)),
    delimiter=",", header="x,y", comments="",
)
print("\nwrote level_curve_rho1.5.csv (rho = 1.5 contour vertices)")
