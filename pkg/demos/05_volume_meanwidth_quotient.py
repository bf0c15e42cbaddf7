#!/usr/bin/env python3
"""Volumes, mean widths and the l1-quotient constant of K_N.

Planar cases are checked against exact areas (shoelace) and Gaussian
closed forms; then a medium-size run records the empirical constants in
|K_N|^(1/n) ~ sqrt(ln(N/n)/n) and the quotient ratio distribution.
"""

import math

import numpy as np

import polylab as pl

# planar sanity: cross-polytope
P = pl.Polytope(np.eye(2))
vol = pl.volume_mc(P, 20000, 1)
print(f"B_1^2: area (MC) = {vol.point_estimate ** 2:.4f} +- "
      f"{2 * vol.point_estimate * vol.std_error:.4f}, exact = "
      f"{pl.volume_exact_2d(P):.4f}")
m = pl.mean_width_M(P, 2000, 2)
star = pl.mean_width_polar(P, 30000, 2)
print(f"M(B_1^2)  = {m.point_estimate:.4f}  (4/pi = {4 / math.pi:.4f})")
print(f"M*(B_1^2) = {star.point_estimate:.4f}  (2 sqrt(2)/pi = "
      f"{2 * math.sqrt(2) / math.pi:.4f})")
san = pl.santalo_check(P, 30000, 3)
print(f"volume product ratio = {san['ratio']:.4f}  (8/pi^2 = "
      f"{8 / math.pi ** 2:.4f}, Santalo upper bound 1)")

# scaling study: rademacher rows, growing aspect ratio
print("\nvolume scaling |K_N|^(1/n) vs sqrt(ln(N/n)/n), rademacher n=5:")
for N in (50, 200, 800):
    e = pl.make_ensemble("rademacher")
    g = pl.sample_matrix(e, N, 5, 7)
    est = pl.volume_mc(pl.Polytope(g), 4000, 7)
    scale = math.sqrt(math.log(N / 5) / 5)
    print(f"  N={N:4d}: estimate {est.point_estimate:.4f}, ratio "
          f"{est.point_estimate / scale:.3f}")

# quotient constant for a gaussian matrix
e = pl.make_ensemble("gaussian")
n, N = 16, 320
g = pl.sample_matrix(e, N, n, 9)
rep = pl.quotient_check(pl.Polytope(g), 10.0, 300, 9)
print(f"\nquotient ratios over 300 mixed-norm-one directions "
      f"(n={n}, N={N}):")
print(f"  median {rep['q50_ratio']:.4f}, 95th {rep['q95_ratio']:.4f}, "
      f"max {rep['max_ratio']:.4f} -> empirical K")
