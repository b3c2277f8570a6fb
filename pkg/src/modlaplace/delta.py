"""Large-order limit of the linear delta expansion at m = 0.

The resummed delta-expansion operator

    D_N(p) = sum_{k<=N} (-p)^k / k! (d/dp)^k = p (-p)^N / N! (d/dp)^N (1/p)

acts on a power of ``p = Omega^2`` as a rational factor:
``D_N p^xi = (1 - xi)(2 - xi)...(N - xi) / N! * p^xi``.  Acting on a Laplace
representation it produces the kernel
``Delta_{N,Omega^2}(t) = Omega^(2N+2) t^N exp(-Omega^2 t) / N!``, a Gamma
density that concentrates at ``t = N / Omega^2``; in the joint limit the
operator therefore evaluates the Heaviside transform at ``x = N / Omega^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import mpf

from .heaviside import evaluate, heaviside_transform
from .precision import Real, as_rational, lower_incomplete_gamma, to_mpf
from .series import Model, PathLike, build_series

RationalLike = Union[int, str, Fraction]


def dn_factor(order: int, xi: RationalLike) -> Fraction:
    """Exact ``prod_{k=1}^{N} (k - xi) / N!`` for rational ``xi``."""
    if order < 1:
        raise ValueError("D_N needs N >= 1")
    xi = as_rational(xi)
    out = Fraction(1)
    for k in range(1, order + 1):
        out *= (k - xi) / k
    return out


def dn_series_factor(order: int, xi: RationalLike) -> Fraction:
    """The same factor from the defining sum: sum_{k<=N} (-1)^k binom(xi, k)."""
    xi = as_rational(xi)
    total = Fraction(0)
    binom = Fraction(1)
    for k in range(order + 1):
        total += (-1) ** k * binom
        binom = binom * (xi - k) / (k + 1)
    return total


def dn_on_power(order: int, omega2: Real, xi: RationalLike) -> mpf:
    """D_N(Omega^2) applied to (Omega^2)^xi."""
    xi = as_rational(xi)
    return to_mpf(dn_factor(order, xi)) * mpmath.power(to_mpf(omega2), to_mpf(xi))


def dn_limit_form(order: int, omega2: Real, xi: RationalLike) -> mpf:
    """Large-N form (Omega^2 / N)^xi / Gamma(1 - xi) of :func:`dn_on_power`."""
    xi = to_mpf(as_rational(xi))
    return mpmath.power(to_mpf(omega2) / order, xi) * mpmath.rgamma(1 - xi)


@dataclass(frozen=True)
class DeltaKernelSample:
    order: int
    omega2: mpf
    t: mpf
    value: mpf


def delta_kernel(order: int, omega2: Real, t: Real) -> DeltaKernelSample:
    """Omega^(2N+2) t^N exp(-Omega^2 t) / N! at ``t > 0``."""
    w, tt = to_mpf(omega2), to_mpf(t)
    if tt <= 0 or w <= 0:
        raise ValueError("delta kernel needs t > 0 and Omega^2 > 0")
    log_value = (order + 1) * mpmath.log(w) + order * mpmath.log(tt) - w * tt - mpmath.loggamma(order + 1)
    return DeltaKernelSample(order, w, tt, mpmath.exp(log_value))


def kernel_argmax(order: int, omega2: Real) -> mpf:
    return mpf(order) / to_mpf(omega2)


def kernel_mean_std(order: int, omega2: Real) -> tuple[mpf, mpf]:
    """Mean (N+1)/Omega^2 and standard deviation sqrt(N+1)/Omega^2."""
    w = to_mpf(omega2)
    return (order + 1) / w, mpmath.sqrt(order + 1) / w


def kernel_mass(order: int, omega2: Real, a: Real, b: Optional[Real] = None) -> mpf:
    """integral_a^b Delta dt (``b=None`` for infinity), from incomplete gammas."""
    w = to_mpf(omega2)
    shape = order + 1
    total = mpmath.gamma(shape)
    lower_a = lower_incomplete_gamma(shape, w * to_mpf(a)) if to_mpf(a) > 0 else mpf(0)
    lower_b = total if b is None else lower_incomplete_gamma(shape, w * to_mpf(b))
    return (lower_b - lower_a) / total


@dataclass(frozen=True)
class DnComparison:
    lhs: mpf
    rhs: mpf
    reldiff: mpf


def dn_vs_heaviside(
    order: int,
    omega2: Real,
    model: Union[str, Model] = Model.ANHARMONIC,
    cache: Optional[PathLike] = None,
) -> DnComparison:
    """D_N applied term-wise to the order-N series, against the transform at N / Omega^2."""
    series = build_series(model, order, 2, cache)
    w = to_mpf(omega2)
    lhs = mpmath.fsum(
        to_mpf(t.coeff) * to_mpf(dn_factor(order, t.exponent)) * mpmath.power(w, to_mpf(t.exponent))
        for t in series.terms
    )
    rhs = evaluate(heaviside_transform(series), order / w)
    return DnComparison(lhs, rhs, abs(lhs - rhs) / abs(rhs))
