from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from modlaplace.heaviside import derivative, evaluate, heaviside_transform
from modlaplace.oracles import E0_EXACT_LITERAL, z_hat_exact
from modlaplace.resummation import (
    ApproximantResult,
    NoStationaryPoint,
    RootRefinementError,
    StationaryPoint,
    _refine,
    approximant,
    beta_scan,
    correction_coefficients,
    find_stationary_points,
    first_appearances,
    remainder_bound,
    remainder_bound_check,
    root_census,
    root_tolerance,
    scaling_diagnostic,
    select_x_star,
    sigma_of,
    strong_coupling_expansion,
)
from modlaplace.series import Model, build_series


def transformed(model, n, beta=2, cache=None):
    series = build_series(model, n, beta, cache)
    return series, heaviside_transform(series)


def largest(model, n, beta=2, cache=None):
    series, hs = transformed(model, n, beta, cache)
    return series, hs, select_x_star(find_stationary_points(hs))


# -- stationary points --------------------------------------------------------------

def test_oscillator_order_one_root():
    _, hs = transformed(Model.ANHARMONIC, 1)
    points = find_stationary_points(hs)
    assert len(points) == 1
    assert abs(points[0].x_star - mpf("0.328248340614232")) < mpf("1e-15")


def test_integral_order_three_root():
    _, hs = transformed(Model.NONGAUSSIAN, 3)
    (p,) = find_stationary_points(hs)
    assert abs(p.x_star ** 2 - mpf("1.5960716")) < mpf("1e-7")


@pytest.mark.parametrize("model", [Model.NONGAUSSIAN, Model.ANHARMONIC])
@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_even_orders_have_no_low_order_root(model, n):
    _, hs = transformed(model, n)
    assert find_stationary_points(hs) == []
    with pytest.raises(NoStationaryPoint):
        select_x_star([])


def test_point_invariants():
    _, hs = transformed(Model.ANHARMONIC, 41)
    points = find_stationary_points(hs)
    assert points
    for i, p in enumerate(points):
        lo, hi = p.bracket
        assert p.index == i
        assert lo < p.x_star < hi
        assert p.residual <= root_tolerance()
        assert p.value == evaluate(hs, p.x_star)
    assert [p.x_star for p in points] == sorted(p.x_star for p in points)


def test_select_single_and_largest():
    _, hs = transformed(Model.NONGAUSSIAN, 5)
    (p,) = find_stationary_points(hs)
    assert select_x_star([p]) is p
    fake = StationaryPoint(p.x_star + 1, p.value, 1, p.residual, p.bracket)
    assert select_x_star([p, fake]) is fake


def test_refinement_failure_carries_bracket():
    _, hs = transformed(Model.NONGAUSSIAN, 3)
    d1, d2 = derivative(hs, 1), derivative(hs, 2)
    lo, hi = mpf(1), mpf("1.5")
    import modlaplace.resummation as r

    saved = r._MAX_BISECTIONS
    r._MAX_BISECTIONS = 3
    try:
        with pytest.raises(RootRefinementError) as err:
            _refine(d1, d2, lo, hi, evaluate(d1, lo))
    finally:
        r._MAX_BISECTIONS = saved
    assert err.value.bracket[0] >= lo and err.value.bracket[1] <= hi


def test_bad_search_range():
    _, hs = transformed(Model.NONGAUSSIAN, 3)
    with pytest.raises(ValueError):
        find_stationary_points(hs, 1, x_min=2)


@pytest.mark.slow
def test_large_order_roots_and_dominance(oscillator_249):
    _, hs, points = oscillator_249
    assert len(points) == 3
    assert abs(points[0].x_star - mpf("1.139689002700")) < mpf("1e-11")
    assert abs(points[1].x_star - mpf("2.069065340532")) < mpf("1e-11")
    e0 = mpf(E0_EXACT_LITERAL)
    assert abs(points[-1].value - e0) < abs(points[0].value - e0)
    assert abs(points[-1].value - mpf("0.667986259143")) < mpf("1e-12")


# -- approximant ----------------------------------------------------------------------

def test_integral_table_row():
    series, hs, p = largest(Model.NONGAUSSIAN, 15)
    res = approximant(series, hs, p, 1)
    assert isinstance(res, ApproximantResult)
    assert abs(res.total - mpf("1.36831695165151724")) < mpf("1e-17")


@pytest.mark.slow
def test_oscillator_large_order_rows(oscillator_249):
    series, hs, points = oscillator_249
    p = select_x_star(points)
    assert abs(approximant(series, hs, p, 1).total - mpf("0.80377065123375873")) < mpf("1e-17")
    assert abs(approximant(series, hs, p, 100).total - mpf("5.00747395574729234")) < mpf("1e-17")


def test_closed_form_matches_quadrature_of_cutoff_integral():
    series, hs, p = largest(Model.ANHARMONIC, 5)
    m2 = mpf("0.7")
    X = p.x_star
    quad = mpmath.exp(-m2 * X) * evaluate(hs, X) + m2 * mpmath.quad(
        lambda x: mpmath.exp(-m2 * x) * evaluate(hs, x), [0, X / 8, X])
    assert abs(approximant(series, hs, p, m2).total - quad) < mpf("1e-25")


def test_general_beta_uses_sigma_m_to_beta():
    series, hs, p = largest(Model.NONGAUSSIAN, 9, Fraction(3, 2))
    res = approximant(series, hs, p, 16)
    assert res.sigma == sigma_of(16, Fraction(3, 2)) == mpf(8)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([Model.NONGAUSSIAN, Model.ANHARMONIC]),
       st.sampled_from([1, 3, 5, 7, 9, 13, 21]),
       st.fractions(min_value=Fraction(1, 10 ** 4), max_value=10 ** 4, max_denominator=10 ** 4))
def test_decomposition_identity(model, n, m2):
    series, hs, p = _cached_largest(model, n)
    res = approximant(series, hs, p, m2)
    gap = res.perturbative_part + res.correction_part - res.total
    assert abs(gap) <= abs(res.total) * mpf(10) ** (8 - mp.dps)


_CACHE = {}


def _cached_largest(model, n):
    key = (model, n, mp.dps)
    if key not in _CACHE:
        _CACHE[key] = largest(model, n)
    return _CACHE[key]


def test_perturbative_part_is_the_bare_series():
    series, hs, p = largest(Model.ANHARMONIC, 7)
    res = approximant(series, hs, p, 3)
    assert abs(res.perturbative_part - series.evaluate(3)) < mpf(10) ** (10 - mp.dps) * abs(res.total) * 10


def test_small_mass_limit_continuity():
    for model, n in ((Model.NONGAUSSIAN, 15), (Model.ANHARMONIC, 9)):
        series, hs, p = largest(model, n)
        res = approximant(series, hs, p, "1e-15")
        assert abs(res.total - p.value) < mpf("1e-10") * abs(p.value)


def test_zero_mass_returns_plateau_value():
    series, hs, p = largest(Model.NONGAUSSIAN, 7)
    res = approximant(series, hs, p, 0)
    assert res.total == p.value
    assert res.perturbative_part is None and res.correction_part is None


def test_infinite_cutoff_recovers_bare_series():
    for model, n in ((Model.NONGAUSSIAN, 15), (Model.ANHARMONIC, 9)):
        series, hs, p = largest(model, n)
        far = approximant(series, hs, 50 * p.x_star, 10).total
        bare = series.evaluate_at_mass(mpmath.sqrt(10))
        assert abs(far - bare) < abs(bare) * mpf("1e-20")


def test_approximant_needs_positive_cutoff():
    series, hs, _ = largest(Model.NONGAUSSIAN, 3)
    with pytest.raises(ValueError):
        approximant(series, hs, 0, 1)


def test_large_mass_correction_matches_b_series():
    # correction ~ -exp(-sigma x*) sum_i b_i / sigma^i for large sigma
    series, hs, p = largest(Model.NONGAUSSIAN, 11)
    sigma = mpf(40)
    res = approximant(series, hs, p, sigma)
    b = correction_coefficients(hs, p.x_star, 12)
    asym = -mpmath.exp(-sigma * p.x_star) * mpmath.fsum(bi / sigma ** (i + 1) for i, bi in enumerate(b))
    assert abs(res.correction_part - asym) < abs(asym) * mpf("1e-6")


# -- correction coefficients and strong coupling --------------------------------------------

@pytest.mark.parametrize("model,n", [(Model.NONGAUSSIAN, 13), (Model.ANHARMONIC, 7), (Model.ANHARMONIC, 29)])
def test_first_correction_coefficient_vanishes(model, n):
    _, hs, p = largest(model, n)
    assert abs(correction_coefficients(hs, p.x_star, 1)[0]) <= root_tolerance()


@pytest.mark.slow
def test_correction_coefficients_large_order(oscillator_249):
    _, hs, points = oscillator_249
    b = correction_coefficients(hs, select_x_star(points).x_star, 7)
    assert abs(b[1] - mpf("8.259931e-10")) < mpf("1e-16")
    assert abs(b[6] - mpf("0.7451039")) < mpf("1e-7")


@pytest.mark.slow
def test_correction_coefficients_shrink_with_order(coefficient_cache):
    sizes = []
    for n in (28, 101, 249):
        _, hs, p = largest(Model.ANHARMONIC, n, 2, coefficient_cache)
        sizes.append([abs(b) for b in correction_coefficients(hs, p.x_star, 4)[1:]])
    for i in range(3):
        assert sizes[0][i] > sizes[1][i] > sizes[2][i]


def test_strong_coupling_integral_order_fifteen():
    _, hs, p = largest(Model.NONGAUSSIAN, 15)
    coeffs = strong_coupling_expansion(hs, p.x_star, 4)
    expected = ["1.811655", "-0.609988", "0.223363", "-0.074001", "0.022042"]
    for c, e in zip(coeffs, expected):
        assert abs(c - mpf(e)) < mpf("1e-6")
    assert coeffs[0] == p.value


def test_strong_coupling_oscillator_order_nine():
    _, hs, p = largest(Model.ANHARMONIC, 9)
    coeffs = strong_coupling_expansion(hs, p.x_star, 4)
    assert abs(coeffs[3] - mpf("0.0007338756445212")) < mpf("1e-16")
    assert abs(coeffs[4] - mpf("-0.000066541377300")) < mpf("1e-15")
    with pytest.raises(ValueError):
        strong_coupling_expansion(hs, p.x_star, 0)


def test_strong_coupling_series_matches_small_mass_approximant():
    series, hs, p = largest(Model.NONGAUSSIAN, 15)
    coeffs = strong_coupling_expansion(hs, p.x_star, 12)
    s = mpf("0.01")
    taylor = mpmath.fsum(c * s ** k for k, c in enumerate(coeffs))
    assert abs(taylor - approximant(series, hs, p, s).total) < mpf("1e-25")


# -- scaling and remainder ---------------------------------------------------------------------

def test_scaling_low_orders():
    rows = scaling_diagnostic(Model.NONGAUSSIAN, [1, 15])
    assert abs(rows[0].x_star_sq - 1) < mpf("1e-30")
    assert abs(rows[1].x_star_sq - mpf("5.0438870")) < mpf("1e-7")
    assert abs(rows[1].ratio - mpf("0.33626")) < mpf("1e-5")
    with pytest.raises(ValueError):
        scaling_diagnostic(Model.NONGAUSSIAN, [4])


def test_table_one_trend_is_monotone():
    rows = scaling_diagnostic(Model.NONGAUSSIAN, [1, 3, 5, 7, 9, 11, 13, 15])
    values = [select_x_star(find_stationary_points(transformed(Model.NONGAUSSIAN, r.order)[1])).value
              for r in rows]
    assert values == sorted(values)
    assert values[-1] < mpmath.gamma(mpf(1) / 4) / 2
    assert [r.x_star_sq for r in rows] == sorted(r.x_star_sq for r in rows)


@pytest.mark.parametrize("n", [7, 15])
def test_remainder_bound_holds(n):
    chk = remainder_bound_check(n)
    assert chk.ok
    assert chk.actual <= chk.bound


def test_remainder_against_exact_transform():
    chk = remainder_bound_check(15)
    exact = z_hat_exact(chk.x_star).value
    _, hs, p = largest(Model.NONGAUSSIAN, 15)
    assert abs(exact - p.value) < remainder_bound(15)
    assert abs(abs(exact - p.value) - chk.actual) < mpf("1e-30")
    # the tail is what separates the tabulated 1.8116546 from 1.8128049
    assert mpf("0.001") < mpmath.gamma(mpf(1) / 4) / 2 - p.value < mpf("0.0012")


def test_remainder_bound_ratio():
    for n in (7, 21, 101):
        ratio = remainder_bound(n + 2) / remainder_bound(n)
        expected = (mpmath.e / 3) ** 2 * (mpf(n + 2) / n) ** mpf(-1.25)
        assert abs(ratio - expected) < mpf(10) ** (10 - mp.dps)


# -- beta scans and census ---------------------------------------------------------------------------

def test_beta_scan_reports_order_used():
    rows = beta_scan(Model.NONGAUSSIAN, 20, ["1.9", 2])
    assert [r.beta for r in rows] == [Fraction(19, 10), Fraction(2)]
    for r in rows:
        assert r.order in (19, 20)
        assert r.value is not None and r.error is None


def test_beta_scan_row_for_missing_root():
    rows = beta_scan(Model.NONGAUSSIAN, 2, [2], x_max="0.05")
    assert rows[0].value is None and rows[0].order is None
    assert rows[0].error == "no stationary point"


def test_beta_scan_rejects_divergent_beta():
    from modlaplace.heaviside import TransformError

    with pytest.raises(TransformError):
        beta_scan(Model.ANHARMONIC, 9, ["3.5"])


@pytest.mark.slow
def test_beta_scan_integral_example():
    (row,) = beta_scan(Model.NONGAUSSIAN, 100, ["1.9"])
    assert row.order == 100
    assert abs(row.value - mpf("1.81719914639")) < mpf("1e-11")
    assert abs(row.x_star - mpf("7.1806")) < mpf("1e-4")


def test_census_and_first_appearance():
    counts = {n: len(root_census(n, samples=1500)) for n in range(24, 30)}
    assert counts[26] == 0 and counts[27] == 1 and counts[28] == 2
    assert first_appearances(counts, 1) == [28]
    assert first_appearances({5: 1, 6: 0}, 2) == [None, None]
