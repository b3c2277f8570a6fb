"""
Choosing the power of the mass
==============================

The representation can be built in ``sigma = m**beta`` for any positive
rational ``beta``.  The plateau value moves with ``beta``, and ``beta = 2``
sits close to the exact answer for both models.
"""

from mpmath import mp, nstr

from modlaplace import beta_scan, pinned_constants

mp.dps = 60
exact = pinned_constants()["Z0_EXACT"]

# %%
# Non-Gaussian integral at order 40
# ---------------------------------
# When an order has no stationary point the scan falls back one order and
# records the order it used.

for row in beta_scan("nongaussian", 40, ["1.5", "1.8", "2", "2.2", "2.5"]):
    if row.value is None:
        print(f"beta = {row.beta}: {row.error}")
        continue
    print(f"beta = {str(row.beta):>4}  N = {row.order}  x* = {nstr(row.x_star, 8):>10}  "
          f"value = {nstr(row.value, 12)}  error = {nstr(abs(row.value - exact), 3)}")
