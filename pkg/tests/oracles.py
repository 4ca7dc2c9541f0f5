"""Slow, independent reference computations the tests check the library against.

Everything here is written the dumbest defensible way — direct enumeration
over cube cells, profiles, or failure sequences — so that agreement with the
library is evidence, not circularity.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def union_coverage(d: int, s: int, profile: tuple[int, ...]) -> int:
    """Count cube cells covered by choosing the first profile[i] digit values
    on axis i, by literally testing every cell of the (s+1)-dimensional cube.
    """
    assert len(profile) == s + 1
    covered = 0
    for cell in itertools.product(range(d), repeat=s + 1):
        if any(cell[i] < profile[i] for i in range(s + 1)):
            covered += 1
    return covered


def admissible_profiles(d: int, s: int, s0: int, k: int):
    """Yield every way k chosen servers can spread over the clusters:
    up to d per complete cluster, up to min(s0, d) in the residual one."""
    caps = [d] * s + [min(s0, d)]
    for profile in itertools.product(*(range(c + 1) for c in caps)):
        if sum(profile) == k:
            yield profile


def min_coverage_exhaustive(d: int, s: int, s0: int, k: int, coverage) -> int:
    """Worst-case distinct-coordinate count over all k-server choices,
    minimizing the supplied coverage function over every admissible profile."""
    return min(coverage(d, s, profile) for profile in admissible_profiles(d, s, s0, k))


def min_cut_formula_exhaustive(alpha, beta, d: int, s: int, k: int, formula):
    """Minimum cut over every collector profile: j repaired servers with any
    cluster-label sequence (labels in [s+1]) plus k - j untouched ones, the
    latter costing alpha each."""
    alpha = Fraction(alpha)
    best = Fraction(k) * alpha
    for length in range(1, k + 1):
        pristine = (k - length) * alpha
        for labels in itertools.product(range(1, s + 2), repeat=length):
            value = formula(list(labels), alpha, beta, d, s) + pristine
            if value < best:
                best = value
    return best


def slow_gf_mul(a: int, b: int) -> int:
    """Carry-less multiply reduced by the degree-16 modulus, bit by bit."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & 0x10000:
            a ^= 0x1100B
    return result
