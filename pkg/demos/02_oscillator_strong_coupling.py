"""
Anharmonic oscillator at strong coupling
========================================

The ground-state energy of ``p^2/2 + m^2 q^2/2 + q^4`` has an exact rational
mass expansion (Bender-Wu).  Expanding the resummed energy around ``m = 0``
gives the strong-coupling coefficients, which are compared here with an
independent eigenvalue calculation.
"""

from mpmath import mp, nstr

from modlaplace import (
    aho_ground_energy,
    anharmonic_coefficients,
    build_series,
    find_stationary_points,
    heaviside_transform,
    select_x_star,
    strong_coupling_expansion,
)
from modlaplace.oracles import aho_strong_coupling

mp.dps = 60

# %%
# Exact coefficients
# ------------------

for n, a in enumerate(anharmonic_coefficients(5)):
    print(f"A_{n} = {a}")

# %%
# Strong-coupling coefficients at increasing order
# ------------------------------------------------
# Only odd orders have a stationary point at low order.

for order in (1, 3, 5, 7, 9):
    hs = heaviside_transform(build_series("anharmonic", order))
    point = select_x_star(find_stationary_points(hs))
    coeffs = strong_coupling_expansion(hs, point.x_star, 2)
    print(f"N = {order}: " + "  ".join(nstr(c, 12) for c in coeffs))

# %%
# The eigenvalue reference
# ------------------------
# A polynomial fit of the eigenvalue on a small interval around m^2 = 0
# recovers the same coefficients to many digits (this takes a few seconds).

print("E(0) =", nstr(aho_ground_energy(0, digits=20).value, 20))
print("fit: " + "  ".join(nstr(r.value, 12) for r in aho_strong_coupling(2, digits=20, nodes=9)))
