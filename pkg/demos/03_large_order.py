"""
Order 249 for the oscillator
============================

At high order the transformed energy has several stationary points.  The
largest one gives the best value.  Generating the exact coefficients takes
a few seconds, so they are kept in a cache file for later runs.
"""

import tempfile
from pathlib import Path

from mpmath import mp, nstr

from modlaplace import (
    anharmonic_coefficients,
    approximant,
    build_series,
    correction_coefficients,
    find_stationary_points,
    heaviside_transform,
    pinned_constants,
    select_x_star,
)

mp.dps = 80
cache = Path(tempfile.gettempdir()) / "modlaplace_demo_coefficients.txt"
anharmonic_coefficients(249, cache)

# %%
# Stationary points
# -----------------

series = build_series("anharmonic", 249, cache=cache)
hs = heaviside_transform(series)
points = find_stationary_points(hs)
e0 = pinned_constants()["E0_EXACT"]
for p in points:
    print(f"x = {nstr(p.x_star, 13)}  value = {nstr(p.value, 13)}  "
          f"distance to E(0) = {nstr(abs(p.value - e0), 3)}")

# %%
# The approximant across masses
# -----------------------------

best = select_x_star(points)
for m2 in ("0.001", "1", "1000"):
    print(f"m^2 = {m2:>6}: {nstr(approximant(series, hs, best, m2).total, 17)}")

# %%
# Coefficients of the exponentially small correction
# --------------------------------------------------
# b_1 vanishes at a stationary point; the later ones stay small.

for i, b in enumerate(correction_coefficients(hs, best.x_star, 5), start=1):
    print(f"b_{i} = {nstr(b, 7)}")
