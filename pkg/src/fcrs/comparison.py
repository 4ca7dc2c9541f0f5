"""Baseline formulas, bandwidth ratios, optimality certificates, and tables.

The baseline is a classical regenerating-code deployment on the same n
servers: repairs may draw from d_o = floor((n-1)/(s-1)) helpers, the most
that remain when the failed server's whole cluster is unavailable. Ratios
compare the clustered system's bandwidth against that baseline at matched
parameters, and the converse bounds certify that the repair-by-transfer
layout meets the best bandwidth any scheme of its class can reach.

Analytic values are exact rationals (file size normalized to 1); only the
asymptotic bound involving e^-1 is checked in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cubic_code import ClusterParams, gamma_cubic
from .errors import InfeasibleError, ParameterError, StructuralError
from .flow_analysis import (
    format_decimal,
    mbr_point,
    tradeoff_alpha,
    tradeoff_thresholds,
)

__all__ = [
    "BaselineParams",
    "ComparisonRow",
    "baseline_mbr",
    "baseline_thresholds",
    "baseline_tradeoff_alpha",
    "functional_ratio",
    "cubic_ratio",
    "converse_bound",
    "comparison_rows",
    "emit_fig4_table",
    "emit_fig6_table",
]


@dataclass(frozen=True)
class BaselineParams:
    """Geometry of the baseline deployment: repairs use every server outside
    the failed one's cluster, d_o = floor((n-1)/(s-1)) helpers."""

    n: int
    k: int
    s: int

    def __post_init__(self) -> None:
        for name in ("n", "k", "s"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParameterError(f"{name} must be an integer, got {v!r}")
        if self.k < 1:
            raise ParameterError(f"need k >= 1, got k={self.k}")
        if self.s < 2:
            raise ParameterError(f"need s >= 2, got s={self.s}")
        if self.n < 1:
            raise ParameterError(f"need n >= 1, got n={self.n}")
        if self.d_o < self.k:
            raise ParameterError(
                f"baseline needs d_o >= k, got d_o={self.d_o}, k={self.k}"
            )

    @property
    def d_o(self) -> int:
        return (self.n - 1) // (self.s - 1)


def baseline_mbr(bp: BaselineParams) -> Fraction:
    """Minimum repair bandwidth of the baseline, 2*d_o / (2k*d_o - k^2 + k)."""
    d_o, k = bp.d_o, bp.k
    return Fraction(2 * d_o, 2 * k * d_o - k * k + k)


def baseline_thresholds(d_o: int, k: int) -> list[Fraction]:
    """Bandwidth breakpoints of the baseline trade-off, descending; the last
    entry is the baseline's smallest feasible bandwidth."""
    if not isinstance(d_o, int) or d_o < 1:
        raise ParameterError(f"need integer d_o >= 1, got {d_o!r}")
    if not isinstance(k, int) or not 1 <= k <= d_o:
        raise ParameterError(f"need integer 1 <= k <= d_o, got k={k!r}, d_o={d_o}")
    return [
        Fraction(2 * d_o, (2 * k - i - 1) * i + 2 * k * (d_o - k + 1))
        for i in range(k)
    ]


def baseline_tradeoff_alpha(gamma, d_o: int, k: int) -> Fraction:
    """Smallest feasible storage per server for the baseline at bandwidth gamma.

    Piecewise linear, flat at 1/k above the first breakpoint, and equal to
    gamma itself at the smallest feasible gamma. Below that, InfeasibleError.
    """
    gamma = Fraction(gamma)
    if gamma < 0:
        raise ParameterError(f"gamma must be nonnegative, got {gamma}")
    thresholds = baseline_thresholds(d_o, k)
    if gamma < thresholds[-1]:
        raise InfeasibleError(
            f"gamma={gamma} is below the baseline minimum {thresholds[-1]}"
        )
    if gamma >= thresholds[0]:
        return Fraction(1, k)
    for i in range(1, len(thresholds)):
        if gamma >= thresholds[i]:
            slope = Fraction((2 * d_o - 2 * k + i + 1) * i, 2 * d_o)
            return (1 - slope * gamma) / (k - i)
    raise StructuralError("threshold scan fell through")  # unreachable


def _framed_params(n: int, k: int, s: int) -> ClusterParams:
    # ratios are stated for n = s*k + s0 with 0 <= s0 < min(k, s), which
    # makes every complete cluster hold exactly k servers (d = k)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (n, k, s)):
        raise ParameterError(f"n, k, s must be integers, got {(n, k, s)!r}")
    s0 = n - s * k
    if s < 2 or k < 1 or not 0 <= s0 < min(k, s):
        raise ParameterError(
            f"ratio formulas need n = s*k + s0 with 0 <= s0 < min(k, s); "
            f"got n={n}, k={k}, s={s} (s0={s0})"
        )
    params = ClusterParams(n, k, s)
    if params.d != k:
        raise StructuralError(f"framing failed to give d=k for {(n, k, s)}")
    return params


def functional_ratio(n: int, k: int, s: int) -> tuple[Fraction, Fraction]:
    """Clustered functional-repair bandwidth over baseline bandwidth, with its
    parameter-free upper bound (2/3) * ((s+3)k + s - 3) / ((s+1)k - 1)."""
    params = _framed_params(n, k, s)
    ratio = mbr_point(params).gamma / baseline_mbr(BaselineParams(n, k, s))
    bound = Fraction(2, 3) * Fraction((s + 3) * k + s - 3, (s + 1) * k - 1)
    assert ratio <= bound, (ratio, bound)
    return ratio, bound


def cubic_ratio(n: int, k: int, s: int) -> tuple[Fraction, float]:
    """Repair-by-transfer bandwidth over baseline bandwidth, with its upper
    bound ((s+3)k + s - 3) / ((s+1)k - 1) / (2 * (1 - e^-1))."""
    params = _framed_params(n, k, s)
    ratio = gamma_cubic(params) / baseline_mbr(BaselineParams(n, k, s))
    bound = ((s + 3) * k + s - 3) / ((s + 1) * k - 1) / (2 * (1 - math.exp(-1)))
    assert float(ratio) <= bound + 1e-9, (ratio, bound)
    return ratio, bound


def _max_uncovered(d: int, s: int, s0: int, k: int) -> int:
    # over all ways to pick k servers (at most d per complete cluster, at
    # most s0 from the residual), maximize the count of cube cells no picked
    # server stores: the product over positions of (d - picks there)
    caps = [d] * s + [min(s0, d)]
    best = {0: 1}
    for cap in caps:
        nxt: dict[int, int] = {}
        for assigned, prod in best.items():
            for c in range(min(cap, k - assigned) + 1):
                value = prod * (d - c)
                total = assigned + c
                if value > nxt.get(total, -1):
                    nxt[total] = value
        best = nxt
    if k not in best:
        raise StructuralError(f"cannot assign k={k} picks under caps {caps}")
    return best[k]


def converse_bound(n: int, k: int, s: int, model: str) -> Fraction | None:
    """Lower bound on repair bandwidth for any scheme of the given class.

    model="rbt" covers every valid geometry; model="exact" is only proven
    for s in {2, 3} with no residual cluster and returns None elsewhere.
    The bound is d**s over the worst-case coverage of k servers, so it
    coincides with gamma_cubic: the layout is bandwidth optimal.
    """
    params = ClusterParams(n, k, s)
    if model not in ("exact", "rbt"):
        raise ParameterError(f"model must be 'exact' or 'rbt', got {model!r}")
    if model == "exact" and (params.s not in (2, 3) or params.s0 != 0):
        return None
    d, s_, s0 = params.d, params.s, params.s0
    uncovered = _max_uncovered(d, s_, s0, k)
    return Fraction(d**s_, d ** (s_ + 1) - uncovered)


@dataclass(frozen=True)
class ComparisonRow:
    """One availability level: the three bandwidth figures and their ratios."""

    availability: int
    gamma_fcrs_functional: Fraction
    gamma_cubic: Fraction
    gamma_baseline_mbr: Fraction

    def __post_init__(self) -> None:
        for name in ("gamma_fcrs_functional", "gamma_cubic", "gamma_baseline_mbr"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    @property
    def functional_ratio(self) -> Fraction:
        return self.gamma_fcrs_functional / self.gamma_baseline_mbr

    @property
    def cubic_ratio(self) -> Fraction:
        return self.gamma_cubic / self.gamma_baseline_mbr


def comparison_rows(n: int, k: int) -> list[ComparisonRow]:
    """Bandwidth comparison across every cluster count 2 <= s <= n // k.

    Cluster counts whose geometry is invalid (residual cluster at least as
    large as a complete one) are skipped.
    """
    if not isinstance(n, int) or not isinstance(k, int) or n < 1 or k < 1:
        raise ParameterError(f"need positive integers n, k, got {(n, k)!r}")
    if n // k < 2:
        raise ParameterError(f"need n // k >= 2 for at least two clusters, got n={n}, k={k}")
    rows = []
    for s in range(2, n // k + 1):
        try:
            params = ClusterParams(n, k, s)
            bp = BaselineParams(n, k, s)
        except ParameterError:
            continue
        rows.append(
            ComparisonRow(
                availability=s - 1,
                gamma_fcrs_functional=mbr_point(params).gamma,
                gamma_cubic=gamma_cubic(params),
                gamma_baseline_mbr=baseline_mbr(bp),
            )
        )
    return rows


def emit_fig4_table(
    n: int, k: int, s: int, points: int
) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
    """Storage-vs-bandwidth table for both models on a shared gamma grid.

    The grid spans from the smaller of the two minimum bandwidths to 1.1x
    the larger of the two plateau breakpoints, so both curves start at
    their minimum-bandwidth points and end flat at 1/k. A gamma below a
    model's feasible range leaves that cell empty.
    """
    if not isinstance(points, int) or points < 2:
        raise ParameterError(f"need at least 2 grid points, got {points!r}")
    params = ClusterParams(n, k, s)
    bp = BaselineParams(n, k, s)
    fcrs_thresholds = tradeoff_thresholds(params.d, k)
    base_thresholds = baseline_thresholds(bp.d_o, k)
    start = min(fcrs_thresholds[-1], base_thresholds[-1])
    end = max(fcrs_thresholds[0], base_thresholds[0]) * Fraction(11, 10)
    rows = []
    for i in range(points):
        gamma = start + (end - start) * Fraction(i, points - 1)
        try:
            fcrs_cell = format_decimal(tradeoff_alpha(gamma, params.d, k))
        except InfeasibleError:
            fcrs_cell = ""
        try:
            base_cell = format_decimal(baseline_tradeoff_alpha(gamma, bp.d_o, k))
        except InfeasibleError:
            base_cell = ""
        rows.append((format_decimal(gamma), fcrs_cell, base_cell))
    return ("gamma", "alpha_fcrs", "alpha_baseline"), rows


def emit_fig6_table(n: int, k: int) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
    """Bandwidth-by-availability table over every cluster count for (n, k)."""
    header = ("availability", "gamma_fcrs_functional", "gamma_cubic", "gamma_baseline")
    rows = [
        (
            str(row.availability),
            format_decimal(row.gamma_fcrs_functional),
            format_decimal(row.gamma_cubic),
            format_decimal(row.gamma_baseline_mbr),
        )
        for row in comparison_rows(n, k)
    ]
    return header, rows
