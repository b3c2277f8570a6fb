"""Working precision and the gamma-function family.

Every real number in the package is an :class:`mpmath.mpf` evaluated at the
precision of the global mpmath context.  The helpers here keep that precision
at or above :data:`MIN_DPS` and provide the gamma, log-gamma and incomplete
gamma functions the transforms are built from.

The incomplete gammas use the usual regime split: the power series for
``z < p + 1`` and a Lentz continued fraction for ``z >= p + 1``; the other
half is obtained from the complement ``Gamma(p) - ...``.  Both are carried
out with guard digits.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from typing import Iterator, Union

import mpmath
from mpmath import mp, mpf

DEFAULT_DPS = 80
MIN_DPS = 30
#: orders above this need LARGE_ORDER_DPS digits (cancellation in the sums)
LARGE_ORDER = 100
LARGE_ORDER_DPS = 60

_GUARD_DIGITS = 12
_MAX_ITER = 200_000
# above this argument Gamma is assembled from log-Gamma
_LOG_GAMMA_SWITCH = 100

Real = Union[int, float, str, Fraction, mpf]


class DomainError(ValueError):
    """Argument outside the domain of a special function or transform."""


class ConvergenceError(ArithmeticError):
    """An iterative evaluation did not reach its tolerance."""


def get_precision() -> int:
    """Current working precision in decimal digits."""
    return mp.dps


def set_precision(dps: int) -> None:
    """Set the global working precision (decimal digits, at least ``MIN_DPS``)."""
    _check_dps(dps)
    mp.dps = dps


@contextlib.contextmanager
def working_precision(dps: int) -> Iterator[None]:
    """Temporarily run at ``dps`` decimal digits."""
    _check_dps(dps)
    with mp.workdps(dps):
        yield


def require_precision(order: int) -> None:
    """Refuse to work at large order with too few digits."""
    if mp.dps < MIN_DPS:
        raise ValueError(f"working precision {mp.dps} < {MIN_DPS} digits")
    if order > LARGE_ORDER and mp.dps < LARGE_ORDER_DPS:
        raise ValueError(
            f"order {order} needs at least {LARGE_ORDER_DPS} digits, "
            f"working precision is {mp.dps}"
        )


def _check_dps(dps: int) -> None:
    if int(dps) != dps or dps < MIN_DPS:
        raise ValueError(f"precision must be an integer >= {MIN_DPS}, got {dps!r}")


def to_mpf(value: Real) -> mpf:
    """Convert ints, strings, Fractions and mpf to an mpf at working precision."""
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    return mpf(value)


def as_rational(value: Union[int, str, float, Fraction]) -> Fraction:
    """Exact rational from user input; floats are read through their repr (1.7 -> 17/10)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def tolerance(digits_lost: int = 5) -> mpf:
    """``10**(-(dps - digits_lost))``: the target relative accuracy."""
    return mpf(10) ** (digits_lost - mp.dps)


def gamma(p: Real) -> mpf:
    """Gamma function for ``p > 0``.

    Large arguments go through :func:`log_gamma` so that no intermediate
    factorial needs to be formed.
    """
    x = to_mpf(p)
    if x <= 0:
        raise DomainError(f"gamma needs p > 0, got {p}")
    if x >= _LOG_GAMMA_SWITCH:
        with mp.extradps(_GUARD_DIGITS):
            value = mpmath.exp(mpmath.loggamma(x))
        return +value
    return mpmath.gamma(x)


def log_gamma(p: Real) -> mpf:
    x = to_mpf(p)
    if x <= 0:
        raise DomainError(f"log_gamma needs p > 0, got {p}")
    return mpmath.loggamma(x)


def _check_args(p: Real, z: Real) -> tuple[mpf, mpf]:
    pp, zz = to_mpf(p), to_mpf(z)
    if pp <= 0:
        raise DomainError(f"incomplete gamma needs p > 0, got {p}")
    if zz < 0:
        raise DomainError(f"incomplete gamma needs z >= 0, got {z}")
    return pp, zz


def _prefactor(p: mpf, z: mpf) -> mpf:
    # z**p * exp(-z), through logarithms so huge p/z stay representable
    return mpmath.exp(p * mpmath.log(z) - z)


def _lower_series(p: mpf, z: mpf) -> mpf:
    eps = mpf(2) ** (-mp.prec)
    term = 1 / p
    total = term
    k = 0
    while abs(term) > eps * abs(total):
        k += 1
        if k > _MAX_ITER:
            raise ConvergenceError(f"lower gamma series did not converge at p={p}, z={z}")
        term = term * z / (p + k)
        total += term
    return _prefactor(p, z) * total


def _upper_fraction(p: mpf, z: mpf) -> mpf:
    # modified Lentz evaluation of the continued fraction for Gamma(p, z)
    eps = mpf(2) ** (-mp.prec)
    tiny = mpf(2) ** (-4 * mp.prec)
    b = z + 1 - p
    c = 1 / tiny
    d = 1 / b
    h = d
    i = 0
    while True:
        i += 1
        if i > _MAX_ITER:
            raise ConvergenceError(f"upper gamma fraction did not converge at p={p}, z={z}")
        an = -i * (i - p)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) <= eps:
            break
    return _prefactor(p, z) * h


def lower_incomplete_gamma(p: Real, z: Real) -> mpf:
    """gamma(p, z) = integral_0^z e^-t t^(p-1) dt  for p > 0, z >= 0."""
    pp, zz = _check_args(p, z)
    if zz == 0:
        return mpf(0)
    with mp.extradps(_GUARD_DIGITS):
        if zz < pp + 1:
            value = _lower_series(pp, zz)
        else:
            value = gamma(pp) - _upper_fraction(pp, zz)
    return +value


def upper_incomplete_gamma(p: Real, z: Real) -> mpf:
    """Gamma(p, z) = integral_z^inf e^-t t^(p-1) dt  for p > 0, z >= 0."""
    pp, zz = _check_args(p, z)
    with mp.extradps(_GUARD_DIGITS):
        if zz == 0:
            value = gamma(pp)
        elif zz < pp + 1:
            value = gamma(pp) - _lower_series(pp, zz)
        else:
            value = _upper_fraction(pp, zz)
    return +value


def upper_gamma_asymptotic(p: Real, z: Real, k_max: int) -> mpf:
    """Truncated large-``z`` expansion of Gamma(p, z).

    ``z**(p-1) e**(-z) [1 + sum_{k=1}^{k_max} (p-1)(p-2)...(p-k) / z**k]``.
    The series is asymptotic, not convergent: increasing ``k_max`` helps only
    while the terms keep shrinking.  Meant for diagnostics of the large-mass
    structure of the correction term.
    """
    pp, zz = to_mpf(p), to_mpf(z)
    if zz <= 0:
        raise DomainError(f"asymptotic form needs z > 0, got {z}")
    term = mpf(1)
    total = mpf(1)
    for k in range(1, k_max + 1):
        term = term * (pp - k) / zz
        total += term
    return mpmath.exp((pp - 1) * mpmath.log(zz) - zz) * total
