"""Finite-window experiments for lattice pairs without a common rational structure.

1. Z^2 against an irrational rotation of itself: the bottleneck of a window
   matching stays put as the window grows.
2. The block form M = [[B, 0], [C, I]] Z^3: every emitted point obeys the
   bound "bottleneck + r".
3. Orbit counts of a ball under an irrational translation of the 2-torus.
4. Unequal covolumes: the matching shortfall keeps growing with the window.

Run:  python3 demos/windows.py
"""
import math

import numpy as np

from latticetile import Lattice
from latticetile.matching import (ball_predicate, case3_common_fd_window, direct_sum_common_fd_window,
                                  g_uniform_probe, window_deficiency)

Z2 = Lattice.integer(2)
c, s = math.cos(1.0), math.sin(1.0)
rotated = Lattice(((c, s), (-s, c)), "approx")

print("1. rotation by 1 rad")
for R in (4, 8, 16):
    rep = direct_sum_common_fd_window(Z2, rotated, R)
    print(f"   R={R:2d}  {rep.sources:4d} points  bottleneck {rep.bottleneck:.4f}  "
          f"{len(rep.F1_points)} distinct displacements")

print("2. block form, r = 1")
B = [[c, -s], [s, c]]
C = [[math.sqrt(2), -0.3]]
rep = case3_common_fd_window(B, C, 6)
norms = np.linalg.norm(rep.F1_points, axis=1)
print(f"   bottleneck {rep.bottleneck:.4f}, largest output {norms.max():.4f} <= limit {rep.limit:.4f}")

print("3. ball of radius 0.4 under (sqrt 2, sqrt 3)")
probe = g_uniform_probe(ball_predicate((0.5, 0.5), 0.4), [[math.sqrt(2), math.sqrt(3)]], (20, 40, 80), 200)
for k in probe.ks:
    print(f"   k={k:2d}  min density {probe.min_density[k]:.3f}  mean {probe.mean_density[k]:.3f}")
print(f"   relative spread {probe.relative_spread():.3f}  (ball area {math.pi * 0.16:.3f})")

print("4. Z^2 into 2Z^2 at distance 1.5")
for R in (4, 8, 16):
    print(f"   R={R:2d}  deficiency {window_deficiency(Z2, Lattice.integer(2, 2), R, 1.5).deficiency}")
