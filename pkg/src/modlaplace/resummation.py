"""Cut-off Laplace approximant built on a transformed series.

Given the transformed truncation ``fhat_N``, the approximant at ``sigma`` is

    f_N(sigma, x*) = exp(-sigma x*) fhat_N(x*) + sigma int_0^x* exp(-sigma x) fhat_N(x) dx

with ``x*`` the largest stationary point of ``fhat_N``.  For a power
``c x**p`` the cut-off integral is ``c sigma**(-p) gamma(p + 1, sigma x*)``,
so everything reduces to lower incomplete gammas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from .heaviside import (
    HeavisideSeries,
    alpha_k,
    check_beta,
    derivative,
    evaluate,
    heaviside_transform,
)
from .precision import (
    ConvergenceError,
    DomainError,
    Real,
    as_rational,
    lower_incomplete_gamma,
    to_mpf,
    upper_incomplete_gamma,
)
from .series import Model, PathLike, PerturbationSeries, build_series

X_MIN = mpf("1e-4")
SAMPLES_PER_ORDER = 64
_BISECT_RTOL_DIGITS = 35
_NEWTON_STEPS = 12
_MAX_BISECTIONS = 2000


class NoStationaryPoint(LookupError):
    """The transformed series has no stationary point in the searched range."""


class RootRefinementError(ConvergenceError):
    def __init__(self, message: str, bracket: tuple[mpf, mpf]):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True)
class StationaryPoint:
    x_star: mpf
    value: mpf
    index: int
    residual: mpf
    bracket: tuple[mpf, mpf]
    tangent: bool = False


@dataclass(frozen=True)
class ApproximantResult:
    """Approximant and its split into ordinary series plus correction.

    At ``sigma = 0`` only ``total`` is defined; the two parts are ``None``.
    """

    sigma: mpf
    total: mpf
    perturbative_part: Optional[mpf]
    correction_part: Optional[mpf]


def root_tolerance() -> mpf:
    """Residual |fhat'(x*)| accepted for a stationary point."""
    return mpf(10) ** (-(mp.dps // 2))


def default_x_max(order: int) -> mpf:
    return mpf(2 * order) / 3 + 5


def _geometric_grid(lo: mpf, hi: mpf, count: int) -> list[mpf]:
    ratio = mpmath.power(hi / lo, mpf(1) / count)
    grid = [lo]
    for _ in range(count - 1):
        grid.append(grid[-1] * ratio)
    grid.append(hi)
    return grid


def _refine(d1: HeavisideSeries, d2: HeavisideSeries, lo: mpf, hi: mpf, f_lo: mpf) -> mpf:
    rtol = max(mpf(10) ** (-_BISECT_RTOL_DIGITS), mpf(10) ** (10 - mp.dps))
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= rtol * hi:
            break
        mid = (lo + hi) / 2
        f_mid = evaluate(d1, mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    else:
        raise RootRefinementError("bisection did not shrink the bracket", (lo, hi))
    x = (lo + hi) / 2
    width = hi - lo
    for _ in range(_NEWTON_STEPS):
        slope = evaluate(d2, x)
        if slope == 0:
            break
        step = evaluate(d1, x) / slope
        x_new = x - step
        # stay inside the bisection bracket (with a little slack)
        if not (lo - width <= x_new <= hi + width):
            break
        x = x_new
        if abs(step) <= mpf(2) ** (-mp.prec) * abs(x):
            break
    return x


def find_stationary_points(
    hs: HeavisideSeries,
    x_max: Optional[Real] = None,
    *,
    x_min: Real = X_MIN,
    samples: Optional[int] = None,
    tol: Optional[mpf] = None,
) -> list[StationaryPoint]:
    """All zeros of ``d hs / dx`` in ``(x_min, x_max]``, ascending.

    The derivative is sampled on a geometric grid (``64 * order`` points by
    default); each sign change is bisected and then polished with Newton
    steps on the exact second derivative.  A sample where the derivative
    vanishes to within ``tol`` without a sign change is kept as a tangency.
    An empty list is a valid answer (e.g. even orders at low N).
    """
    x_lo = to_mpf(x_min)
    x_hi = to_mpf(x_max) if x_max is not None else default_x_max(hs.order)
    if not 0 < x_lo < x_hi:
        raise ValueError("need 0 < x_min < x_max")
    n = samples or SAMPLES_PER_ORDER * max(hs.order, 1)
    tol = root_tolerance() if tol is None else to_mpf(tol)
    d1 = derivative(hs, 1)
    d2 = derivative(hs, 2)
    grid = _geometric_grid(x_lo, x_hi, n)
    vals = [evaluate(d1, x) for x in grid]

    found: list[tuple[mpf, tuple[mpf, mpf], bool]] = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            continue
        if fb == 0 or (fa < 0) != (fb < 0):
            x = b if fb == 0 else _refine(d1, d2, a, b, fa)
            found.append((x, (a, b), False))
        elif 0 < i and abs(fa) <= tol and (vals[i - 1] < 0) == (fa < 0):
            # touches zero without crossing
            found.append((a, (grid[i - 1], b), True))

    points = []
    for x, bracket, tangent in found:
        residual = abs(evaluate(d1, x))
        if residual > tol:
            raise RootRefinementError(
                f"root near x={mpmath.nstr(x, 12)} has residual {mpmath.nstr(residual, 5)}",
                bracket,
            )
        points.append(
            StationaryPoint(x, evaluate(hs, x), len(points), residual, bracket, tangent)
        )
    return points


def select_x_star(points: Sequence[StationaryPoint]) -> StationaryPoint:
    """The largest stationary point (edge of the reliable region)."""
    if not points:
        raise NoStationaryPoint("no stationary point: the series has no plateau at this order")
    return max(points, key=lambda p: p.x_star)


def _guard_digits(hs: HeavisideSeries, sigma: mpf) -> int:
    # size of the largest ordinary-series term relative to 1
    biggest = mpf(0)
    for c, p in hs.terms:
        if c == 0:
            continue
        mag = mpmath.log10(abs(c)) + mpmath.log10(mpmath.gamma(1 + to_mpf(p))) - to_mpf(p) * mpmath.log10(sigma)
        biggest = max(biggest, mag)
    return 10 + int(math.ceil(float(biggest)))


def sigma_of(m2: Real, beta: Fraction) -> mpf:
    """sigma = m**beta from m**2."""
    return mpmath.power(to_mpf(m2), to_mpf(beta) / 2)


def approximant(
    series: Optional[PerturbationSeries],
    hs: HeavisideSeries,
    x_star: Union[Real, StationaryPoint],
    m2: Real,
) -> ApproximantResult:
    """Cut-off Laplace approximant at mass squared ``m2``.

    ``total = exp(-sigma X) hs(X) + sum c sigma**(-p) gamma(p+1, sigma X)``,
    ``correction = exp(-sigma X) hs(X) - sum c sigma**(-p) Gamma(p+1, sigma X)``
    and ``perturbative = sum c Gamma(p+1) sigma**(-p)``, the ordinary Laplace
    transform of ``hs`` (equal to ``series`` at ``sigma``).  The sums are
    carried with enough guard digits to absorb the cancellation between
    the large ordinary terms.  ``total`` is rounded to working precision;
    the two parts keep their guard digits, so that adding them reproduces
    ``total`` to working precision even when each part is many orders of
    magnitude larger.  ``m2 <= 0`` returns the ``sigma -> 0`` limit ``hs(X)``.
    """
    X = to_mpf(x_star.x_star if isinstance(x_star, StationaryPoint) else x_star)
    if X <= 0:
        raise DomainError("x* must be positive")
    m2 = to_mpf(m2)
    beta = series.beta if series is not None else hs.beta
    if m2 <= 0:
        return ApproximantResult(mpf(0), evaluate(hs, X), None, None)
    sigma = sigma_of(m2, beta)
    guard = _guard_digits(hs, sigma)
    with mp.extradps(guard):
        z = sigma * X
        boundary = mpmath.exp(-z) * evaluate(hs, X)
        inner, outer, ordinary = [], [], []
        for c, p in hs.terms:
            pp = to_mpf(p)
            scale = c * mpmath.power(sigma, -pp)
            inner.append(scale * lower_incomplete_gamma(pp + 1, z))
            outer.append(scale * upper_incomplete_gamma(pp + 1, z))
            ordinary.append(scale * mpmath.gamma(pp + 1))
        total = boundary + mpmath.fsum(inner)
        correction = boundary - mpmath.fsum(outer)
        perturbative = mpmath.fsum(ordinary)
    return ApproximantResult(+sigma, +total, perturbative, correction)


def correction_coefficients(hs: HeavisideSeries, x_star: Real, i_max: int) -> list[mpf]:
    """[b_1, ..., b_imax] with b_i the i-th derivative of ``hs`` at ``x*``.

    These are the coefficients of the large-sigma expansion
    ``correction = -exp(-sigma x*) sum_i b_i / sigma**i``; ``b_1`` vanishes at
    a stationary point.
    """
    x = to_mpf(x_star)
    return [evaluate(derivative(hs, i), x) for i in range(1, i_max + 1)]


def strong_coupling_expansion(hs: HeavisideSeries, x_star: Real, K: int) -> list[mpf]:
    """Taylor coefficients [alpha_0, alpha_1/1!, ..., alpha_K/K!] in sigma."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return [alpha_k(hs, x_star, k) / mpmath.factorial(k) for k in range(K + 1)]


def largest_stationary_point(
    model: Union[str, Model],
    order: int,
    beta: Union[int, str, float, Fraction] = 2,
    *,
    cache: Optional[PathLike] = None,
    x_max: Optional[Real] = None,
) -> tuple[HeavisideSeries, StationaryPoint]:
    hs = heaviside_transform(build_series(model, order, beta, cache))
    return hs, select_x_star(find_stationary_points(hs, x_max))


@dataclass(frozen=True)
class ScalingRow:
    order: int
    x_star: mpf
    x_star_sq: mpf
    ratio: mpf


def scaling_diagnostic(
    model: Union[str, Model], orders: Sequence[int], cache: Optional[PathLike] = None
) -> list[ScalingRow]:
    """Largest stationary point per odd order with ``x*^2`` and ``x*^2 / N``."""
    rows = []
    for order in orders:
        if order % 2 == 0:
            raise ValueError(f"scaling diagnostic takes odd orders, got {order}")
        _, point = largest_stationary_point(model, order, cache=cache)
        sq = point.x_star ** 2
        rows.append(ScalingRow(order, point.x_star, sq, sq / order))
    return rows


@dataclass(frozen=True)
class RemainderCheck:
    order: int
    x_star: mpf
    bound: mpf
    actual: mpf
    ok: bool


def remainder_bound(order: int) -> mpf:
    """(e/3)^(5/4) / (sqrt(8 pi) (1 - e/3)) N^(-5/4) (e/3)^N."""
    r = mpmath.e / 3
    n = mpf(order)
    return r ** mpf(1.25) / (mpmath.sqrt(8 * mpmath.pi) * (1 - r)) * n ** mpf(-1.25) * r ** n


def remainder_bound_check(order: int) -> RemainderCheck:
    """Tail of the integral-model transform at its own x*, against the bound.

    The tail ``|Zhat_inf(x*) - Zhat_N(x*)|`` uses the order-4N truncation as
    the reference for ``Zhat_inf``.
    """
    if order % 2 == 0 or order < 1:
        raise ValueError("remainder check takes odd orders")
    hs, point = largest_stationary_point(Model.NONGAUSSIAN, order)
    reference = heaviside_transform(build_series(Model.NONGAUSSIAN, 4 * order))
    actual = abs(evaluate(reference, point.x_star) - point.value)
    bound = remainder_bound(order)
    return RemainderCheck(order, point.x_star, bound, actual, bool(actual <= bound))


@dataclass(frozen=True)
class BetaScanRow:
    beta: Fraction
    order: Optional[int]
    x_star: Optional[mpf]
    value: Optional[mpf]
    error: Optional[str] = None


def beta_scan(
    model: Union[str, Model],
    order: int,
    betas: Sequence[Union[int, str, float, Fraction]],
    *,
    cache: Optional[PathLike] = None,
    x_max: Optional[Real] = None,
) -> list[BetaScanRow]:
    """Plateau value at the largest stationary point for each ``beta``.

    Order ``order`` is tried first and ``order - 1`` when it has no stationary
    point; the row records which one was used.  A beta with no root at either
    parity gives a row with ``error`` set instead of raising.
    """
    model = Model.parse(model)
    rows = []
    for b in betas:
        beta = as_rational(b)
        check_beta(model, beta)
        row = BetaScanRow(beta, None, None, None, "no stationary point")
        for n in (order, order - 1):
            if n < 0:
                continue
            hs = heaviside_transform(build_series(model, n, beta, cache))
            points = find_stationary_points(hs, x_max)
            if points:
                best = select_x_star(points)
                row = BetaScanRow(beta, n, best.x_star, best.value)
                break
        rows.append(row)
    return rows


def root_census(
    order: int,
    model: Union[str, Model] = Model.ANHARMONIC,
    *,
    x_range: tuple[Real, Real] = ("0.02", 4),
    samples: int = 3000,
    cache: Optional[PathLike] = None,
) -> list[StationaryPoint]:
    """Stationary points on a fixed window, for counting roots order by order."""
    hs = heaviside_transform(build_series(model, order, 2, cache))
    return find_stationary_points(hs, x_range[1], x_min=x_range[0], samples=samples)


def first_appearances(counts: dict[int, int], how_many: int = 3) -> list[Optional[int]]:
    """Order at which the k-th plateau stationary point first shows up.

    Odd orders always carry the breakdown root, so the k-th plateau point
    exists once some order has at least ``k + 1`` roots.
    """
    out = []
    for k in range(1, how_many + 1):
        hits = [n for n in sorted(counts) if counts[n] >= k + 1]
        out.append(hits[0] if hits else None)
    return out
