"""Term-wise Heaviside transform and operations on the transformed series.

The Bromwich transform of ``f(sigma)/sigma`` maps ``sigma**xi`` to
``x**(-xi) / Gamma(1 - xi)`` for ``x > 0``.  Positive integer powers of sigma
map to zero, and the step function at ``x = 0`` is represented by only ever
evaluating at ``x > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence
import warnings

import mpmath
from mpmath import mp, mpf

from .precision import DomainError, Real, gamma, require_precision, to_mpf
from .series import Model, PerturbationSeries

# divergence thresholds of the transformed built-in series (finite radius at equality)
BETA_LIMITS = {Model.NONGAUSSIAN: Fraction(4), Model.ANHARMONIC: Fraction(3)}


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class HeavisideSeries:
    """sum_i coeff_i * x**power_i on x > 0, terms sorted by ascending power."""

    terms: tuple[tuple[mpf, Fraction], ...]
    order: int
    model: Model = Model.CUSTOM
    beta: Fraction = Fraction(2)
    # undifferentiated series this one was derived from, and how many times
    origin: Optional["HeavisideSeries"] = field(default=None, compare=False, repr=False)
    derivative_order: int = 0

    @property
    def powers(self) -> list[Fraction]:
        return [p for _, p in self.terms]

    @property
    def coefficients(self) -> list[mpf]:
        return [c for c, _ in self.terms]

    def __call__(self, x: Real) -> mpf:
        return evaluate(self, x)

    @cached_property
    def _steps(self) -> tuple[list[int], list[mpf]]:
        # term i uses x**power_i = x**power_{i-1} * x**step[i]; distinct steps indexed
        index: dict[Fraction, int] = {}
        keys = []
        prev = None
        for _, p in self.terms:
            step = p if prev is None else p - prev
            keys.append(index.setdefault(step, len(index)))
            prev = p
        return keys, [to_mpf(s) for s in index]

    def __add__(self, other: "HeavisideSeries") -> "HeavisideSeries":
        return HeavisideSeries(
            _merge(self.terms + other.terms), max(self.order, other.order), Model.CUSTOM, self.beta
        )


def _merge(terms: Sequence[tuple[mpf, Fraction]]) -> tuple[tuple[mpf, Fraction], ...]:
    merged: dict[Fraction, mpf] = {}
    for c, p in terms:
        merged[p] = merged.get(p, mpf(0)) + c
    return tuple((merged[p], p) for p in sorted(merged) if merged[p] != 0)


def check_beta(model: Model, beta: Fraction) -> None:
    limit = BETA_LIMITS.get(model)
    if limit is None:
        return
    if beta > limit:
        raise TransformError(
            f"beta={beta} exceeds {limit}: the transformed {model.value} series diverges"
        )
    if beta == limit:
        warnings.warn(
            f"beta={beta}: transformed {model.value} series has a finite convergence radius",
            RuntimeWarning,
            stacklevel=3,
        )


def heaviside_transform(series: PerturbationSeries) -> HeavisideSeries:
    """Map each ``a sigma**xi`` to ``a x**(-xi) / Gamma(1 - xi)``.

    Terms with ``xi`` a positive integer transform to zero and are dropped;
    any other ``xi >= 1`` has no Laplace representation and is rejected.
    """
    require_precision(series.order)
    check_beta(series.model, series.beta)
    out = []
    for term in series.terms:
        xi = term.exponent
        if xi >= 1:
            if xi.denominator == 1:
                continue
            raise TransformError(f"sigma**({xi}) has no Heaviside transform (needs xi < 1)")
        power = -xi
        coeff = to_mpf(term.coeff)
        if power != 0:
            coeff = coeff / gamma(1 + power)
        out.append((coeff, power))
    return HeavisideSeries(_merge(out), series.order, series.model, series.beta)


def _raw_terms(hs: HeavisideSeries, x: mpf, prec: int) -> list[tuple]:
    # raw libmp values of each term; skips mpf object overhead in the hot loop
    keys, steps = hs._steps
    factors = [None] * len(steps)
    values = []
    xp = mpf(1)._mpf_
    rnd = mpmath.libmp.round_nearest
    mul = mpmath.libmp.mpf_mul
    for (c, _), key in zip(hs.terms, keys):
        factor = factors[key]
        if factor is None:
            factor = factors[key] = mpmath.power(x, steps[key])._mpf_
        xp = mul(xp, factor, prec, rnd)
        values.append(mul(c._mpf_, xp, prec, rnd))
    return values


def _sum(values: list[tuple], prec: int, absolute: bool = False) -> mpf:
    return mp.make_mpf(
        mpmath.libmp.mpf_sum(values, prec, mpmath.libmp.round_nearest, absolute=absolute)
    )


def evaluate_with_error(hs: HeavisideSeries, x: Real) -> tuple[mpf, mpf]:
    """Value at ``x > 0`` and a bound on its accumulated rounding error.

    Terms are summed in ascending-power order with an exact accumulation
    that rounds once; the bound is therefore set by the rounding of the
    individual terms, ``~ eps * sum |t_i|``.
    """
    x = _positive(x)
    with mp.extradps(5):
        values = _raw_terms(hs, x, mp.prec)
        total = _sum(values, mp.prec)
        scale = _sum(values, mp.prec, absolute=True)
    eps = mpf(2) ** (-mp.prec)
    err = eps * (2 * len(values) * scale + abs(total))
    return +total, +err


def evaluate(hs: HeavisideSeries, x: Real) -> mpf:
    x = _positive(x)
    with mp.extradps(5):
        total = _sum(_raw_terms(hs, x, mp.prec), mp.prec)
    return +total


def _positive(x: Real) -> mpf:
    x = to_mpf(x)
    if x <= 0:
        raise DomainError(f"Heaviside series live on x > 0, got x={x}")
    return x


def _falling(p: Fraction, i: int) -> Fraction:
    out = Fraction(1)
    for j in range(i):
        out *= p - j
    return out


def derivative(hs: HeavisideSeries, i: int = 1) -> HeavisideSeries:
    """The ``i``-th derivative, term by term; constants vanish.

    Derivatives are always taken from the undifferentiated series with one
    exact rational factor per term, so repeated differentiation gives
    exactly the same coefficients as a single call of the combined order.
    """
    if i < 0:
        raise ValueError("derivative order must be >= 0")
    if i == 0:
        return hs
    base = hs.origin if hs.origin is not None else hs
    total = hs.derivative_order + i
    out = []
    for c, p in base.terms:
        factor = _falling(p, total)
        if factor == 0:
            continue
        out.append((c * to_mpf(factor), p - total))
    return HeavisideSeries(tuple(out), hs.order, hs.model, hs.beta, base, total)


def alpha_k(hs: HeavisideSeries, x_star: Real, k: int) -> mpf:
    """integral_0^x* (-x)^k d/dx hs(x) dx, in closed form.

    ``alpha_0`` is the value at ``x*`` itself.  For ``k >= 1`` each term
    ``c x^p`` contributes ``(-1)^k c p x*^(k+p) / (k+p)``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    x = to_mpf(x_star)
    if x <= 0:
        raise DomainError("x* must be positive")
    if k == 0:
        return evaluate(hs, x)
    parts = []
    with mp.extradps(5):
        for c, p in hs.terms:
            if p == 0:
                continue
            if p + k == 0:
                raise ArithmeticError(f"term x**{p} integrates to a logarithm at k={k}")
            if p + k < 0:
                raise DomainError(f"term x**{p} is not integrable at 0 for k={k}")
            q = p + k
            parts.append(c * to_mpf(p / q) * mpmath.power(x, to_mpf(q)))
        total = mpmath.fsum(parts)
    return (-1) ** k * +total
