"""Baseline comparison: classic regenerating codes versus the clustered system."""

import math
from fractions import Fraction

import pytest

from fcrs.comparison import (
    BaselineParams,
    ComparisonRow,
    baseline_mbr,
    baseline_thresholds,
    baseline_tradeoff_alpha,
    comparison_rows,
    converse_bound,
    cubic_ratio,
    emit_fig4_table,
    emit_fig6_table,
    functional_ratio,
)
from fcrs.cubic_code import ClusterParams, gamma_cubic
from fcrs.errors import InfeasibleError, ParameterError
from fcrs.flow_analysis import mbr_point


# ---------------------------------------------------------------- baseline


def test_baseline_helper_count():
    assert BaselineParams(n=45, k=15, s=3).d_o == 22
    assert BaselineParams(n=400, k=20, s=20).d_o == 21
    with pytest.raises(ParameterError):
        BaselineParams(n=6, k=5, s=3)  # fewer helpers than recoverers


def test_baseline_mbr_anchors():
    assert baseline_mbr(BaselineParams(n=45, k=15, s=3)) == Fraction(44, 450)
    assert baseline_mbr(BaselineParams(n=400, k=20, s=20)) == Fraction(42, 460)


def test_baseline_thresholds_and_alpha():
    d_o, k = 22, 15
    thresholds = baseline_thresholds(d_o, k)
    assert len(thresholds) == k
    assert all(a > b for a, b in zip(thresholds, thresholds[1:]))
    assert thresholds[-1] == baseline_mbr(BaselineParams(n=45, k=15, s=3))
    # plateau at and above the first threshold
    assert baseline_tradeoff_alpha(thresholds[0], d_o, k) == Fraction(1, k)
    assert baseline_tradeoff_alpha(Fraction(2), d_o, k) == Fraction(1, k)
    # the minimum-bandwidth end stores exactly the bandwidth
    assert baseline_tradeoff_alpha(thresholds[-1], d_o, k) == thresholds[-1]
    with pytest.raises(InfeasibleError):
        baseline_tradeoff_alpha(thresholds[-1] - Fraction(1, 10**9), d_o, k)


def test_baseline_alpha_piecewise_values():
    """Interior pieces follow the classic storage/bandwidth exchange line."""
    d_o, k = 10, 6
    thresholds = baseline_thresholds(d_o, k)
    for i in range(1, k):
        gamma = (thresholds[i - 1] + thresholds[i]) / 2
        expected = (1 - Fraction(i * (2 * d_o - 2 * k + i + 1), 2 * d_o) * gamma) / (
            k - i
        )
        assert baseline_tradeoff_alpha(gamma, d_o, k) == expected


# ---------------------------------------------------------------- ratios


def test_functional_ratio_anchor():
    ratio, bound = functional_ratio(45, 15, 3)
    assert ratio == Fraction(15, 169) / Fraction(44, 450)
    assert bound == Fraction(2, 3) * Fraction((3 + 3) * 15 + 3 - 3, (3 + 1) * 15 - 1)
    assert ratio <= bound
    assert abs(float(ratio) - 0.9077) < 1e-3


def test_cubic_ratio_anchor():
    ratio, bound = cubic_ratio(45, 15, 3)
    assert ratio == gamma_cubic(ClusterParams(45, 15, 3)) / Fraction(44, 450)
    assert abs(float(ratio) - 0.9689) < 5e-3
    assert float(ratio) <= bound + 1e-9
    expected_bound = (
        1 / (2 * (1 - math.exp(-1))) * ((3 + 3) * 15 + 3 - 3) / ((3 + 1) * 15 - 1)
    )
    assert bound == pytest.approx(expected_bound, rel=1e-12)


def test_ratios_require_full_clusters():
    # n = 12, k = 3, s = 3 leaves three leftover servers: not the framed shape
    with pytest.raises(ParameterError):
        functional_ratio(12, 3, 3)
    with pytest.raises(ParameterError):
        cubic_ratio(12, 3, 3)


def test_ratio_bounds_hold_on_a_wide_grid():
    """Both proposition bounds hold for every framed shape with s <= 8, k <= 20."""
    for s in range(2, 9):
        for k in range(2, 21):
            for s0 in range(0, min(k, s)):
                n = s * k + s0
                f_ratio, f_bound = functional_ratio(n, k, s)
                assert f_ratio <= f_bound, (n, k, s)
                c_ratio, c_bound = cubic_ratio(n, k, s)
                assert float(c_ratio) <= c_bound + 1e-9, (n, k, s)


def test_divisible_family_bound_below_one_outside_exceptions():
    """On shapes where both systems' helper counts come out exact (s divides
    n and s - 1 divides n - 1), the minimum-bandwidth ratio stays below 1
    except for a short list of tiny cluster/recoverer combinations."""
    # two recoverers are always an exception: their exact ratio equals the
    # quarter-square relaxation and sits just above 1 for every cluster count
    for ell in (1, 2, 3):
        for s in range(2, 7):
            d_c = ell * s - ell + 1
            n = d_c * s
            assert (n - 1) % (s - 1) == 0
            for k in range(2, d_c + 1):
                gamma_c = mbr_point(ClusterParams(n, k, s)).gamma
                gamma_o = baseline_mbr(BaselineParams(n, k, s))
                ratio = gamma_c / gamma_o
                # the quarter-square relaxation of the ratio, in exact form
                d_o = ell * s + 1
                relaxed = (
                    Fraction(d_c)
                    / (k * d_c - Fraction(k**2, 4))
                    / (Fraction(2 * d_o) / (2 * k * d_o - k**2 + k))
                )
                assert ratio <= relaxed
                if s == 2 or k == 2 or (s, k) == (3, 3):
                    continue
                assert relaxed <= 1, (ell, s, k, relaxed)


def test_two_recoverers_never_gain_at_minimum_bandwidth():
    """With k = 2 the clustered helper pool is smaller, so its minimum
    bandwidth is strictly worse no matter how many clusters there are."""
    ratio = mbr_point(ClusterParams(25, 2, 5)).gamma / baseline_mbr(
        BaselineParams(25, 2, 5)
    )
    assert ratio == Fraction(55, 54)


# ---------------------------------------------------------------- converse


def test_converse_matches_achieved_bandwidth():
    for n, k, s in [(6, 2, 2), (9, 3, 3), (13, 4, 3), (22, 5, 4)]:
        params = ClusterParams(n, k, s)
        achieved = gamma_cubic(params)
        assert converse_bound(n, k, s, model="rbt") == achieved
        exact = converse_bound(n, k, s, model="exact")
        if s in (2, 3) and params.s0 == 0:
            assert exact == achieved
        else:
            assert exact is None


def test_converse_rejects_unknown_model():
    with pytest.raises(ParameterError):
        converse_bound(6, 2, 2, model="help-by-transfer")


# ---------------------------------------------------------------- tables


def test_comparison_rows_cover_every_cluster_count():
    rows = comparison_rows(400, 20)
    assert [row.availability for row in rows] == list(range(1, 20))
    last = rows[-1]
    assert last.gamma_fcrs_functional == Fraction(20, 300)
    assert last.gamma_cubic == Fraction(20**19, 20**20 - 19**20)
    assert last.gamma_baseline_mbr == Fraction(42, 460)
    assert all(row.functional_ratio <= row.cubic_ratio for row in rows)


def test_comparison_row_rejects_nonpositive():
    with pytest.raises(ParameterError):
        ComparisonRow(
            availability=1,
            gamma_fcrs_functional=Fraction(0),
            gamma_cubic=Fraction(1, 2),
            gamma_baseline_mbr=Fraction(1, 2),
        )


def test_fig6_table_formatting():
    header, rows = emit_fig6_table(400, 20)
    assert header == (
        "availability",
        "gamma_fcrs_functional",
        "gamma_cubic",
        "gamma_baseline",
    )
    assert len(rows) == 19
    assert rows[-1] == (
        "19",
        "0.0666666666667",
        "0.0779406122898",
        "0.0913043478261",
    )


def test_fig4_table_grid_and_feasibility_gap():
    header, rows = emit_fig4_table(100, 10, 10, 200)
    assert header == ("gamma", "alpha_fcrs", "alpha_baseline")
    assert len(rows) == 200
    # grid starts at the smaller system minimum where the baseline cannot
    # operate yet, and ends past both storage plateaus
    assert rows[0][1] != "" and rows[0][2] == ""
    assert rows[-1][1] == rows[-1][2] == "0.1"
    gammas = [float(r[0]) for r in rows]
    assert gammas == sorted(gammas)
    baseline_cols = [r[2] for r in rows]
    first_feasible = next(i for i, v in enumerate(baseline_cols) if v)
    assert all(v != "" for v in baseline_cols[first_feasible:])


def test_fig4_rows_match_library_calls():
    from fcrs.flow_analysis import format_decimal

    header, rows = emit_fig4_table(45, 15, 3, 40)
    point = mbr_point(ClusterParams(45, 15, 3))
    # the grid opens exactly at the smaller system's minimum bandwidth,
    # where storage equals bandwidth
    assert rows[0][0] == format_decimal(point.gamma)
    assert rows[0][1] == format_decimal(point.alpha)
    # identical inputs give identical bytes
    assert emit_fig4_table(45, 15, 3, 40) == (header, rows)
