"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` (or plain pytest; the lines
print through capsys suppression either way).
"""

import itertools
import math
import time
from contextlib import contextmanager
from fractions import Fraction

from fcrs.comparison import (
    BaselineParams,
    baseline_mbr,
    baseline_thresholds,
    baseline_tradeoff_alpha,
    converse_bound,
    cubic_ratio,
    emit_fig4_table,
    functional_ratio,
)
from fcrs.cubic_code import (
    ClusterParams,
    coverage_count,
    encode_file,
    gamma_cubic,
    plan_parameters,
)
from fcrs.errors import InfeasibleError
from fcrs.flow_analysis import (
    fstar_closed,
    mbr_point,
    sweep_min_cut,
    tradeoff_alpha,
    tradeoff_thresholds,
)
from fcrs.repair_sim import generate_schedule, run_simulation, verify_recovery
from .oracles import admissible_profiles, union_coverage


@contextmanager
def criterion(capsys, number: int, label: str):
    started = time.monotonic()
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"ACCEPTANCE {number}: FAIL — {label}")
        raise
    elapsed = time.monotonic() - started
    with capsys.disabled():
        print(f"ACCEPTANCE {number}: PASS — {label} ({elapsed:.2f} s)")


def test_criterion_1_reference_ratios(capsys):
    """Minimum-bandwidth ratios for n=45, k=15, s=3 match the published
    figures: functional 0.9077 +/- 0.001, explicit layout 0.9689 +/- 0.005."""
    with criterion(capsys, 1, "minimum-bandwidth ratio reproduction"):
        started = time.monotonic()
        params = ClusterParams(45, 15, 3)
        gamma_functional = mbr_point(params).gamma
        gamma_explicit = gamma_cubic(params)
        gamma_base = baseline_mbr(BaselineParams(45, 15, 3))
        assert abs(float(gamma_functional / gamma_base) - 0.9077) <= 1e-3
        assert abs(float(gamma_explicit / gamma_base) - 0.9689) <= 5e-3
        assert time.monotonic() - started < 1.0


def test_criterion_2_min_cut_oracle_equivalence(capsys):
    """For (6,2,2) and (9,3,3), the exhaustive minimum cut over every failure
    sequence of length <= k and every collector equals the closed form at
    every half-step storage/bandwidth ratio in [0, d], and a two-cluster
    pattern attains it."""
    with criterion(capsys, 2, "exhaustive min-cut equals closed form"):
        started = time.monotonic()
        for n, k, s in [(6, 2, 2), (9, 3, 3)]:
            params = ClusterParams(n, k, s)
            beta = Fraction(2)
            ratios = [(Fraction(a), beta) for a in range(0, 2 * params.d + 1)]
            for point in sweep_min_cut(params, ratios):
                assert point.minimum == point.closed_form, (n, point.alpha)
                assert point.twin_minimum == point.closed_form, (n, point.alpha)
        assert time.monotonic() - started < 600


def test_criterion_3_tradeoff_inversion_and_crossover(capsys):
    """For (100,10,10): inverting the trade-off puts every grid point back on
    cut value exactly 1, the clustered system is alone feasible at its own
    minimum bandwidth, and the classic system stores strictly less at and
    beyond its storage plateau."""
    with criterion(capsys, 3, "trade-off inversion and crossover"):
        started = time.monotonic()
        d, k = 10, 10
        d_o = BaselineParams(100, 10, 10).d_o
        mbr_c = tradeoff_thresholds(d, k)[-1]
        f0 = tradeoff_thresholds(d, k)[0]
        lo, hi = mbr_c, Fraction(11, 10) * f0
        for i in range(200):
            gamma = lo + (hi - lo) * Fraction(i, 199)
            alpha = tradeoff_alpha(gamma, d, k)
            assert fstar_closed(alpha, gamma / d, d, k) == 1, gamma
        # crossover, clustered side: the baseline cannot operate this low
        mbr_o = baseline_thresholds(d_o, k)[-1]
        assert mbr_c < mbr_o
        try:
            baseline_tradeoff_alpha(mbr_c, d_o, k)
            assert False, "baseline should be infeasible at the clustered MBR"
        except InfeasibleError:
            pass
        # crossover, classic side: at its plateau edge it stores 1/k while
        # the clustered system still needs more than that
        f0_o = baseline_thresholds(d_o, k)[0]
        assert baseline_tradeoff_alpha(f0_o, d_o, k) == Fraction(1, k)
        assert tradeoff_alpha(f0_o, d, k) > Fraction(1, k)
        assert time.monotonic() - started < 1.0


def test_criterion_4_cubic_optimizer_equivalence(capsys):
    """Planned worst-case coverage equals exhaustive minimization over every
    admissible server spread for s in {2,3,4}, d in 2..6, every residual
    size and every k; closed-form coverage equals brute-force union counting
    for d <= 4, s <= 3."""
    with criterion(capsys, 4, "layout optimizer equals exhaustive search"):
        started = time.monotonic()
        checked = 0
        for s in (2, 3, 4):
            for d in range(2, 7):
                for s0 in range(0, min(s, d)):
                    for k in range(1, d + 1):
                        params = ClusterParams(d * s + s0, k, s)
                        plan = plan_parameters(params)
                        exhaustive = min(
                            coverage_count(d, s, profile, s0=s0)
                            for profile in admissible_profiles(d, s, s0, k)
                        )
                        assert plan.message_length == exhaustive, (d, s, s0, k)
                        checked += 1
        assert checked == 171
        for s in (2, 3):
            for d in (2, 3, 4):
                for profile in itertools.product(range(d + 1), repeat=s + 1):
                    assert coverage_count(d, s, profile) == union_coverage(
                        d, s, profile
                    )
        assert time.monotonic() - started < 300


def test_criterion_5_end_to_end_storage(capsys):
    """1 MiB on (12,4,3): a 100-event seeded schedule leaves every server
    byte-identical, all 495 recovery subsets reproduce the file, and every
    repair moves exactly stripe_count * 64 symbols."""
    with criterion(capsys, 5, "end-to-end storage with full recovery sweep"):
        started = time.monotonic()
        params = ClusterParams(12, 4, 3)
        payload = bytes(
            (i * 131 + (i >> 8) * 17 + (i >> 16) * 7) & 0xFF
            for i in range(1 << 20)
        )
        state = encode_file(payload, params)
        pristine = {a: arr.tobytes() for a, arr in state.servers.items()}
        schedule = generate_schedule(params, "random", 100, seed=20240816)
        _, ledger = run_simulation(state, schedule)
        assert all(
            state.servers[a].tobytes() == pristine[a] for a in pristine
        ), "simulation must restore every server bytewise"
        per_repair = state.stripe_count * 64
        assert all(e.symbols_moved == per_repair for e in ledger.entries)
        assert ledger.total_symbols == 100 * per_repair
        report = verify_recovery(state, mode="all")
        assert report.checked == 495
        assert report.ok, report.failures[:3]
        assert time.monotonic() - started < 120


def test_criterion_6_bound_suite(capsys):
    """Every published bound holds, in exact arithmetic where stated, across
    the criterion-4 parameter grid; the converse matches the achieved
    bandwidth under repair-by-transfer everywhere and under exact repair for
    two or three complete clusters with no residual server."""
    grid = [
        (d * s + s0, k, s)
        for s in (2, 3, 4)
        for d in range(2, 7)
        for s0 in range(0, min(s, d))
        for k in range(1, d + 1)
    ]
    with criterion(capsys, 6, "bound suite and converse equality"):
        for n, k, s in grid:
            params = ClusterParams(n, k, s)
            d, s0 = params.d, params.s0
            gamma = gamma_cubic(params)
            # single-term relaxation of the worst-case coverage (exact)
            corollary = Fraction(1, d) / (
                1 - (1 - Fraction(k, (s + 1) * d)) ** (s + 1)
            )
            assert gamma <= corollary, (n, k, s)
            if s0 == 0:
                complete_only = Fraction(1, d) / (1 - (1 - Fraction(k, s * d)) ** s)
                assert gamma <= complete_only, (n, k, s)
            # universal per-recoverer bounds
            assert float(gamma) < 1.58 / k, (n, k, s)
            assert baseline_mbr(BaselineParams(n, k, s)) < Fraction(2, k)
            # proposition bounds wherever the framed shape applies (d == k)
            if d == k and s0 < min(k, s):
                f_ratio, f_bound = functional_ratio(n, k, s)
                assert f_ratio <= f_bound
                c_ratio, c_bound = cubic_ratio(n, k, s)
                assert float(c_ratio) <= c_bound + 1e-9
            # converse bounds
            assert converse_bound(n, k, s, model="rbt") == gamma
            exact = converse_bound(n, k, s, model="exact")
            if s in (2, 3) and s0 == 0:
                assert exact == gamma
            else:
                assert exact is None
        # bandwidth never grows when every cluster gains a server
        for s in (2, 3, 4):
            for k in range(1, 7):
                values = [
                    gamma_cubic(ClusterParams(d * s, k, s))
                    for d in range(max(2, k), 7)
                ]
                assert all(a >= b for a, b in zip(values, values[1:])), (s, k)
        with capsys.disabled():
            print(
                "NOTE: the bandwidth ratio is monotone along complete-cluster "
                "growth; growing the residual cluster can raise it "
                "(64/184 at n=12 vs 64/175 at n=13 for k=4, s=3), so the "
                "monotonicity check runs over complete-cluster steps."
            )


def test_criterion_7_asymptotic_factors_documented(capsys):
    """The 2/3 and 0.79 improvement factors are limits as s and k grow and
    are not attained at desk scale; finite-grid ratios stay strictly above
    them, and the finite-parameter statements are covered by criterion 6."""
    with criterion(capsys, 7, "asymptotic factors documented, not reproduced"):
        functional_limit = Fraction(2, 3)
        cubic_limit = 1 / (2 * (1 - math.exp(-1)))
        for s in range(2, 9):
            for k in range(2, 21):
                for s0 in range(0, min(k, s)):
                    n = s * k + s0
                    f_ratio, _ = functional_ratio(n, k, s)
                    assert f_ratio > functional_limit, (n, k, s)
                    c_ratio, _ = cubic_ratio(n, k, s)
                    assert float(c_ratio) > cubic_limit - 1e-9, (n, k, s)
