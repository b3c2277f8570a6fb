"""Row builders for the reference tables, figure data and reports.

Every builder returns one or more :class:`~modlaplace.output.Table` objects
whose rows pair the approximant with an independent oracle value.  Heavy
inputs (the order-249 oscillator series and its stationary points) are
memoised per precision so that several tables share them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from .delta import (
    delta_kernel,
    dn_factor,
    dn_limit_form,
    dn_on_power,
    dn_vs_heaviside,
    kernel_argmax,
    kernel_mass,
    kernel_mean_std,
)
from .heaviside import HeavisideSeries, evaluate_with_error, heaviside_transform
from .oracles import (
    Method,
    OracleResult,
    aho_ground_energy,
    aho_strong_coupling,
    pinned_constants,
    z_exact,
    z_hat_exact,
)
from .output import Measured, Table
from .precision import as_rational, to_mpf
from .resummation import (
    StationaryPoint,
    approximant,
    beta_scan,
    correction_coefficients,
    find_stationary_points,
    first_appearances,
    root_census,
    select_x_star,
    strong_coupling_expansion,
)
from .series import Model, PathLike, anharmonic_coefficients, build_series

Progress = Optional[Callable[[int, int], None]]

TABLE1_ORDERS = (1, 3, 5, 7, 9, 11, 13, 15)
TABLE2_M2 = ("0.01", "0.1", "1", "3", "6", "10", "100")
TABLE3_ORDERS = (1, 3, 5, 7, 9)
TABLE4_M2 = ("0.001", "0.01", "0.1", "1", "10", "100", "1000")
LARGE_ORDER = 249
B_ORDERS = (28, 101, 249)
BETAS = {
    Model.NONGAUSSIAN: ("1.5", "1.7", "1.9", "2.0", "2.1"),
    Model.ANHARMONIC: ("1.7", "1.8", "1.9", "2.0", "2.1"),
}
FIGURE_BETAS = ("1", "1.5", "2", "2.5", "3")
KERNEL_ORDERS = (31, 51, 71)
KERNEL_XI = ("0", "1/2", "1", "-1", "3/2")
ORACLE_DIGITS = 20


def oracle_at_zero(model: Model) -> OracleResult:
    """f(0) for a built-in model: Gamma(1/4)/2 or the pinned E(0)."""
    consts = pinned_constants()
    if model is Model.NONGAUSSIAN:
        value = consts["Z0_EXACT"]
        return OracleResult(value, Method.CLOSED_FORM, abs(value) * mpf(10) ** (5 - mp.dps))
    return OracleResult(consts["E0_EXACT"], Method.PINNED, mpf("1e-24"))


def _measured(result: OracleResult) -> Measured:
    return Measured(result.value, result.error_estimate)


def _value(hs: HeavisideSeries, x: mpf) -> Measured:
    return Measured(*evaluate_with_error(hs, x))


def linear_grid(start: Union[str, Fraction], stop: Union[str, Fraction],
                step: Union[str, Fraction]) -> list[mpf]:
    """``start, start+step, ..., stop`` computed from exact rationals."""
    a, b, h = as_rational(start), as_rational(stop), as_rational(step)
    count = int((b - a) / h)
    return [to_mpf(a + i * h) for i in range(count + 1)]


def log_grid(lo: Union[str, Fraction], hi: Union[str, Fraction], per_decade: int) -> list[mpf]:
    a, b = to_mpf(as_rational(lo)), to_mpf(as_rational(hi))
    decades = mpmath.log10(b / a)
    count = int(mpmath.nint(decades * per_decade))
    return [a * mpmath.power(10, mpf(i) / per_decade) for i in range(count + 1)]


# --------------------------------------------------------------------------
# shared heavy inputs
# --------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _transformed(model: Model, order: int, beta: Fraction, cache: Optional[str], dps: int):
    series = build_series(model, order, beta, cache)
    return series, heaviside_transform(series)


@lru_cache(maxsize=32)
def _points(model: Model, order: int, beta: Fraction, cache: Optional[str], dps: int):
    _, hs = _transformed(model, order, beta, cache, dps)
    return tuple(find_stationary_points(hs))


def transformed(model: Union[str, Model], order: int, beta=2, cache: Optional[PathLike] = None):
    """(series, transformed series), memoised per working precision."""
    key_cache = None if cache is None else str(cache)
    return _transformed(Model.parse(model), order, as_rational(beta), key_cache, mp.dps)


def stationary_points(model: Union[str, Model], order: int, beta=2,
                      cache: Optional[PathLike] = None) -> tuple[StationaryPoint, ...]:
    key_cache = None if cache is None else str(cache)
    return _points(Model.parse(model), order, as_rational(beta), key_cache, mp.dps)


def ensure_coefficients(order: int, cache: Optional[PathLike], progress: Progress = None) -> None:
    """Generate (or load) the oscillator coefficients up to ``order`` once."""
    anharmonic_coefficients(order, cache, progress)


# --------------------------------------------------------------------------
# tables
# --------------------------------------------------------------------------

def table1(orders: Sequence[int] = TABLE1_ORDERS) -> Table:
    """Plateau value and x*^2 of the transformed integral, order by order."""
    exact = _measured(oracle_at_zero(Model.NONGAUSSIAN))
    table = Table("table1", ["N", "Zhat_N(x*)", "x*^2", "exact"])
    for n in orders:
        _, hs = transformed(Model.NONGAUSSIAN, n)
        points = stationary_points(Model.NONGAUSSIAN, n)
        if not points:
            table.add(n, None, None, exact)
            continue
        x = select_x_star(points).x_star
        table.add(n, _value(hs, x), x * x, exact)
    return table


def table2(m2_values: Sequence = TABLE2_M2, order: int = 15) -> Table:
    """Integral approximant at a fixed order against quadrature."""
    series, hs = transformed(Model.NONGAUSSIAN, order)
    point = select_x_star(stationary_points(Model.NONGAUSSIAN, order))
    table = Table("table2", ["m2", f"Z_{order}(m2,x*)", "exact", "x*^2"])
    for m2 in m2_values:
        res = approximant(series, hs, point, m2)
        table.add(_cell_m2(m2), res.total, _measured(z_exact(m2)), point.x_star ** 2)
    return table


def table3(orders: Sequence[int] = TABLE3_ORDERS, K: int = 4, with_exact: bool = True) -> Table:
    """Strong-coupling coefficients alpha_k/k! of the oscillator at low orders.

    The ``exact`` row comes from a polynomial fit of the eigen oracle around
    ``m^2 = 0``; the ``E(0)`` column is the pinned ground-state energy.
    """
    alphas = [f"alpha_{k}" for k in range(1, K + 1)]
    table = Table("table3", ["N", "Ehat(x*)", *alphas, "x*", "E(0)"])
    e0 = _measured(oracle_at_zero(Model.ANHARMONIC))
    for n in orders:
        _, hs = transformed(Model.ANHARMONIC, n)
        points = stationary_points(Model.ANHARMONIC, n)
        if not points:
            table.add(n, *([None] * (K + 2)), e0)
            continue
        x = select_x_star(points).x_star
        coeffs = strong_coupling_expansion(hs, x, K)
        table.add(n, _value(hs, x), *coeffs[1:], x, e0)
    if with_exact:
        exact = aho_strong_coupling(K)
        table.add("exact", *map(_measured, exact), None, e0)
    return table


def table4(
    m2_values: Sequence = TABLE4_M2,
    order: int = LARGE_ORDER,
    cache: Optional[PathLike] = None,
    progress: Progress = None,
) -> Table:
    """Oscillator approximant at the largest stationary point against the eigen oracle."""
    ensure_coefficients(order, cache, progress)
    series, hs = transformed(Model.ANHARMONIC, order, 2, cache)
    point = select_x_star(stationary_points(Model.ANHARMONIC, order, 2, cache))
    table = Table("table4", ["m2", f"E_{order}(m2,x*)", "exact", "x*"])
    for m2 in m2_values:
        res = approximant(series, hs, point, m2)
        oracle = aho_ground_energy(m2, digits=ORACLE_DIGITS)
        table.add(_cell_m2(m2), res.total, _measured(oracle), point.x_star)
    return table


def _cell_m2(m2) -> Union[Fraction, mpf]:
    try:
        return as_rational(m2)
    except (TypeError, ValueError):
        return to_mpf(m2)


TABLES = {1: table1, 2: table2, 3: table3, 4: table4}


# --------------------------------------------------------------------------
# figure data
# --------------------------------------------------------------------------

def figure1(grid: Optional[Sequence[mpf]] = None, orders: Sequence[int] = (1, 4, 7)) -> Table:
    """Transformed integral at a few orders next to the exact transform."""
    grid = grid or linear_grid("1/50", "4", "1/50")
    table = Table("figure1", ["x", *(f"Zhat_{n}" for n in orders), "Zhat_exact"])
    series = [transformed(Model.NONGAUSSIAN, n)[1] for n in orders]
    for x in grid:
        table.add(x, *(_value(hs, x) for hs in series), _measured(z_hat_exact(x)))
    return table


def figure2(grid: Optional[Sequence[mpf]] = None, orders: Sequence[int] = (1, 5)) -> Table:
    """Ratio of the oscillator approximant to the eigen oracle over m^2."""
    grid = grid or log_grid("0.01", "100", 5)
    prepared = []
    for n in orders:
        series, hs = transformed(Model.ANHARMONIC, n)
        prepared.append((series, hs, select_x_star(stationary_points(Model.ANHARMONIC, n))))
    table = Table("figure2", ["m2", *(f"ratio_N{n}" for n in orders), "exact"])
    for m2 in grid:
        oracle = aho_ground_energy(m2, digits=15)
        ratios = [approximant(s, hs, p, m2).total / oracle.value for s, hs, p in prepared]
        table.add(m2, *(Measured(r, oracle.error_estimate * 10) for r in ratios),
                  _measured(oracle))
    return table


def figure3(
    grid: Optional[Sequence[mpf]] = None,
    order: int = LARGE_ORDER,
    cache: Optional[PathLike] = None,
    progress: Progress = None,
) -> Table:
    """Transformed oscillator series at large order across plateau and breakdown."""
    grid = grid or linear_grid("1/10", "34/10", "1/100")[1:]
    ensure_coefficients(order, cache, progress)
    _, hs = transformed(Model.ANHARMONIC, order, 2, cache)
    table = Table("figure3", ["x", f"Ehat_{order}"])
    for x in grid:
        table.add(x, _value(hs, x))
    return table


def _beta_curves(name, model, order, betas, grid, cache) -> Table:
    label = "Zhat" if model is Model.NONGAUSSIAN else "Ehat"
    cols = [f"{label}_{order}(beta={as_rational(b)})" for b in betas]
    series = [transformed(model, order, b, cache)[1] for b in betas]
    table = Table(name, ["x", *cols])
    for x in grid:
        table.add(x, *(_value(hs, x) for hs in series))
    return table


def figure4(grid: Optional[Sequence[mpf]] = None, order: int = 100,
            betas: Sequence = FIGURE_BETAS) -> Table:
    """Transformed integral at fixed order for several beta."""
    grid = grid or linear_grid("1/10", "20", "1/10")
    return _beta_curves("figure4", Model.NONGAUSSIAN, order, betas, grid, None)


def figure5(
    grid: Optional[Sequence[mpf]] = None,
    order: int = LARGE_ORDER,
    betas: Sequence = FIGURE_BETAS,
    cache: Optional[PathLike] = None,
    progress: Progress = None,
) -> Table:
    """Transformed oscillator series at large order for several beta."""
    grid = grid or linear_grid("1/20", "8", "1/20")
    ensure_coefficients(order, cache, progress)
    return _beta_curves("figure5", Model.ANHARMONIC, order, betas, grid, cache)


FIGURES = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5}


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def betascan_table(
    model: Union[str, Model],
    order: int,
    betas: Optional[Sequence] = None,
    cache: Optional[PathLike] = None,
) -> Table:
    """(beta, N used, x*, value, |value - oracle|) with failures kept as rows."""
    model = Model.parse(model)
    betas = BETAS.get(model, ("2",)) if betas is None else betas
    oracle = oracle_at_zero(model)
    table = Table("betascan", ["beta", "N", "x*", "value", "abs_error", "note"])
    for row in beta_scan(model, order, betas, cache=cache):
        if row.value is None:
            table.add(row.beta, None, None, None, None, row.error)
            continue
        error = abs(row.value - oracle.value)
        table.add(row.beta, row.order, row.x_star, row.value,
                  Measured(error, oracle.error_estimate + abs(row.value) * mpf(10) ** (-mp.dps + 10)),
                  "")
    return table


def largeorder_tables(
    order: int = LARGE_ORDER,
    census_orders: Optional[Iterable[int]] = None,
    b_orders: Sequence[int] = B_ORDERS,
    i_max: int = 7,
    cache: Optional[PathLike] = None,
    progress: Progress = None,
) -> list[Table]:
    """Stationary points at ``order``, root census, b_i and first appearances."""
    ensure_coefficients(max([order, *b_orders]), cache, progress)
    e0 = oracle_at_zero(Model.ANHARMONIC).value

    points = stationary_points(Model.ANHARMONIC, order, 2, cache)
    _, hs = transformed(Model.ANHARMONIC, order, 2, cache)
    roots = Table("stationary_points", ["N", "index", "x", "value", "value-E(0)", "residual"])
    for p in points:
        v = _value(hs, p.x_star)
        roots.add(order, p.index, p.x_star, v, Measured(v.value - e0, v.error), p.residual)

    census_orders = range(1, order + 1) if census_orders is None else census_orders
    census = Table("census", ["N", "count", "largest_x*", "x*^2/N", "roots"])
    counts = {}
    for n in census_orders:
        found = root_census(n, cache=cache)
        counts[n] = len(found)
        if found:
            x = found[-1].x_star
            census.add(n, len(found), x, x * x / n,
                       ";".join(mpmath.nstr(p.x_star, 12) for p in found))
        else:
            census.add(n, 0, None, None, "no stationary point")

    firsts = Table("first_appearance", ["k", "N"])
    for k, n in enumerate(first_appearances(counts), start=1):
        firsts.add(k, n)

    bees = Table("correction_coefficients", ["N", "x*", *(f"b_{i}" for i in range(1, i_max + 1))])
    for n in b_orders:
        pts = stationary_points(Model.ANHARMONIC, n, 2, cache)
        _, hs_n = transformed(Model.ANHARMONIC, n, 2, cache)
        if not pts:
            bees.add(n, None, *([None] * i_max))
            continue
        x = select_x_star(pts).x_star
        bees.add(n, x, *correction_coefficients(hs_n, x, i_max))
    return [roots, census, firsts, bees]


def kernel_tables(
    orders: Sequence[int] = KERNEL_ORDERS,
    omega2: Optional[object] = None,
    model: Union[str, Model] = Model.ANHARMONIC,
    xis: Sequence = KERNEL_XI,
    cache: Optional[PathLike] = None,
) -> list[Table]:
    """Delta-kernel shape, D_N on single powers, and D_N against the transform.

    With ``omega2`` unset each order uses ``Omega^2 = N`` so that the kernel
    peaks at ``t = 1``.
    """
    model = Model.parse(model)
    kern = Table("kernel", ["N", "omega2", "argmax", "peak", "mean", "std/mean",
                            "mass_3sigma", "lhs", "rhs", "reldiff"])
    for n in orders:
        w = to_mpf(n) if omega2 is None else to_mpf(omega2)
        t0 = kernel_argmax(n, w)
        mean, std = kernel_mean_std(n, w)
        width = 3 * t0 / mpmath.sqrt(n)
        mass = kernel_mass(n, w, t0 - width, t0 + width)
        cmp = dn_vs_heaviside(n, w, model, cache)
        kern.add(n, w, t0, delta_kernel(n, w, t0).value, mean, std / mean, mass,
                 cmp.lhs, cmp.rhs, cmp.reldiff)

    powers = Table("dn_factors", ["xi", "N", "factor", "lngamma_form", "D_N(omega2^xi)",
                                  "limit_form"])
    for n in orders:
        w = to_mpf(n) if omega2 is None else to_mpf(omega2)
        for xi in xis:
            q = as_rational(xi)
            x = to_mpf(q)
            lg = mpmath.rgamma(1 - x) * mpmath.gamma(n + 1 - x) / mpmath.gamma(n + 1)
            powers.add(q, n, dn_factor(n, q), lg, dn_on_power(n, w, q), dn_limit_form(n, w, q))
    return [kern, powers]
