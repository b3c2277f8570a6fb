"""
Link with the linear delta expansion
====================================

The resummed delta-expansion operator acts on a power ``p**xi`` as a
rational factor.  In the joint limit of large order and large ``p`` it
evaluates the Heaviside-transformed series at ``x = N / p``, because its
Laplace kernel is a gamma density that narrows around that point.
"""

from fractions import Fraction

from mpmath import mp, nstr

from modlaplace.delta import (
    dn_factor,
    dn_limit_form,
    dn_on_power,
    dn_vs_heaviside,
    kernel_mass,
    kernel_mean_std,
)

mp.dps = 50

# %%
# Action on single powers
# -----------------------

for xi in (0, 1, Fraction(1, 2), Fraction(-3, 4)):
    print(f"xi = {str(xi):>5}: factor at N = 6 is {dn_factor(6, xi)}")
print("N = 400, p = 100, xi = 1/2:",
      nstr(dn_on_power(400, 100, "1/2"), 10), "vs limit", nstr(dn_limit_form(400, 100, "1/2"), 10))

# %%
# The kernel narrows
# ------------------

for n in (10, 100, 1000):
    mean, std = kernel_mean_std(n, n)
    mass = kernel_mass(n, n, 1 - 3 / mp.sqrt(n), 1 + 3 / mp.sqrt(n))
    print(f"N = {n:4d}: std/mean = {nstr(std / mean, 5)}  mass within 3 widths = {nstr(mass, 6)}")

# %%
# Operator against the transformed series
# ---------------------------------------

for n in (21, 41, 61):
    cmp = dn_vs_heaviside(n, n, "nongaussian")
    print(f"N = {n}: operator {nstr(cmp.lhs, 10)}  transform {nstr(cmp.rhs, 10)}  "
          f"relative difference {nstr(cmp.reldiff, 3)}")
