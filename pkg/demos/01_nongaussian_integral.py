"""
Resumming the non-Gaussian integral
===================================

``Z(m) = int exp(-m^2 q^2 - q^4) dq`` has a mass expansion that diverges
for every ``m``.  This script builds the truncated series, moves it to the
Heaviside (cut-off) representation, picks the cut-off at a stationary point
and compares the resummed value with quadrature.
"""

from mpmath import mp, nstr

from modlaplace import (
    approximant,
    build_series,
    find_stationary_points,
    heaviside_transform,
    select_x_star,
    z_exact,
)

mp.dps = 60

# %%
# The bare series
# ---------------
# At order 15 the series is useless at m^2 = 1: the terms grow factorially.

series = build_series("nongaussian", 15)
for n in (0, 5, 10, 15):
    print(f"a_{n:<2d} = {nstr(series.terms[n].coeff, 8)}")
print("bare series at m^2 = 1:", nstr(series.evaluate(1), 10))

# %%
# The transformed series and its plateau
# --------------------------------------
# After the transform every power of sigma becomes a power of x divided by a
# gamma function, and the result is a smooth function of x with a flat
# stretch.  Its stationary point sets the cut-off.

hs = heaviside_transform(series)
points = find_stationary_points(hs)
point = select_x_star(points)
print(f"x* = {nstr(point.x_star, 12)}, plateau value = {nstr(point.value, 12)}")

# %%
# The resummed value at finite mass
# ---------------------------------

for m2 in ("0.01", "1", "10", "100"):
    res = approximant(series, hs, point, m2)
    exact = z_exact(m2).value
    print(f"m^2 = {m2:>5}: approximant {nstr(res.total, 15):>18}  exact {nstr(exact, 15):>18}")
