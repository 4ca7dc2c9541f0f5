"""Failure/repair simulator driving the storage layer end to end.

Schedules are explicit event lists so runs are reproducible; the ledger
records every transfer so bandwidth accounting can be audited against the
layout's promise of d**s symbols per stripe per repair.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from . import cubic_code
from .cubic_code import ClusterParams, ClusterState
from .errors import CorruptionError, ParameterError, StructuralError
from .flow_analysis import FailureEvent

__all__ = [
    "Schedule",
    "LedgerEntry",
    "BandwidthLedger",
    "RecoveryReport",
    "generate_schedule",
    "run_simulation",
    "verify_recovery",
]

POLICIES = ("random", "twin", "round-robin")


@dataclass(frozen=True)
class Schedule:
    """Ordered failure events plus the policy tag that produced them."""

    events: tuple[FailureEvent, ...]
    policy: str


@dataclass(frozen=True)
class LedgerEntry:
    """Bandwidth accounting for one repair; addresses as stored (cluster
    1-based, server 0-based), symbol counts totalled over all stripes."""

    slot: int
    cluster: int
    server: int
    helper_cluster: int
    symbols_moved: int
    per_helper: dict[int, int]


@dataclass
class BandwidthLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    @property
    def total_symbols(self) -> int:
        return sum(entry.symbols_moved for entry in self.entries)

    def csv_rows(self) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
        """Header and rows for export; server numbers are 1-based to match
        the on-disk file naming."""
        header = ("slot", "cluster", "server", "helper_cluster", "symbols_moved")
        rows = [
            (
                str(entry.slot),
                str(entry.cluster),
                str(entry.server + 1),
                str(entry.helper_cluster),
                str(entry.symbols_moved),
            )
            for entry in self.entries
        ]
        return header, rows


def _eligible_helpers(params: ClusterParams, failed_cluster: int) -> list[int]:
    return [h for h in range(1, params.s + 1) if h != failed_cluster]


def generate_schedule(
    params: ClusterParams,
    policy: str,
    length: int,
    seed: int | None = None,
    k1: int | None = None,
) -> Schedule:
    """Build a deterministic failure schedule.

    random: failed server uniform over all servers, helper uniform over the
    other complete clusters, driven by seed. round-robin: servers fail in
    address order with the eligible helpers rotating. twin: the two-cluster
    minimizing pattern, k1 failures in cluster 1 then k - k1 in cluster 2;
    requires length == k and ceil(k/2) <= k1 <= min(k, d).
    """
    if policy not in POLICIES:
        raise ParameterError(f"policy must be one of {POLICIES}, got {policy!r}")
    if not isinstance(length, int) or isinstance(length, bool) or length < 0:
        raise ParameterError(f"length must be a nonnegative integer, got {length!r}")
    if policy != "twin" and k1 is not None:
        raise ParameterError(f"k1 only applies to the twin policy, got k1={k1!r}")

    events: list[FailureEvent] = []
    if policy == "twin":
        k, d = params.k, params.d
        if k1 is None:
            raise ParameterError("twin policy requires k1")
        if not isinstance(k1, int) or not (k + 1) // 2 <= k1 <= min(k, d):
            raise ParameterError(
                f"twin policy needs ceil(k/2) <= k1 <= min(k, d), got k1={k1!r}"
            )
        if length != k:
            raise ParameterError(
                f"twin policy produces exactly k={k} events, got length={length}"
            )
        for j in range(k1):
            events.append(FailureEvent(slot=j + 1, failed=(1, j), helper_cluster=2))
        for j in range(k - k1):
            events.append(FailureEvent(slot=k1 + j + 1, failed=(2, j), helper_cluster=1))
    elif policy == "random":
        rng = random.Random(seed)
        addresses = list(params.addresses())
        for t in range(1, length + 1):
            failed = rng.choice(addresses)
            helper = rng.choice(_eligible_helpers(params, failed[0]))
            events.append(FailureEvent(slot=t, failed=failed, helper_cluster=helper))
    else:  # round-robin
        cycle: Iterator[tuple[int, int]] = itertools.cycle(params.addresses())
        for t in range(1, length + 1):
            failed = next(cycle)
            eligible = _eligible_helpers(params, failed[0])
            helper = eligible[(t - 1) % len(eligible)]
            events.append(FailureEvent(slot=t, failed=failed, helper_cluster=helper))
    return Schedule(events=tuple(events), policy=policy)


def run_simulation(
    state: ClusterState, schedule: Schedule
) -> tuple[ClusterState, BandwidthLedger]:
    """Apply a schedule's repairs in slot order, collecting the ledger.

    The state is updated in place and returned. The first failing repair
    aborts the run; its error is re-raised with the slot index attached.
    """
    if not isinstance(schedule, Schedule):
        raise ParameterError(f"schedule must be a Schedule, got {type(schedule).__name__}")
    ledger = BandwidthLedger()
    for ev in schedule.events:
        try:
            transcript = cubic_code.repair(state, ev.failed, ev.helper_cluster)
        except (ParameterError, StructuralError) as exc:
            raise type(exc)(f"slot {ev.slot}: {exc}") from exc
        ledger.entries.append(
            LedgerEntry(
                slot=ev.slot,
                cluster=ev.failed[0],
                server=ev.failed[1],
                helper_cluster=ev.helper_cluster,
                symbols_moved=transcript.symbols_moved,
                per_helper={
                    j: values.size for j, (_, values) in transcript.per_helper.items()
                },
            )
        )
    return state, ledger


@dataclass
class RecoveryReport:
    """Outcome of a recovery sweep; failures list (subset, reason) pairs."""

    mode: str
    checked: int
    failures: list[tuple[tuple[tuple[int, int], ...], str]]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_recovery(
    state: ClusterState,
    mode: str = "all",
    count: int | None = None,
    seed: int | None = None,
) -> RecoveryReport:
    """Decode from k-subsets of servers and check each result's digest.

    mode="all" sweeps every k-subset in address order; mode="sample" draws
    count distinct subsets with the given seed. The report lists subsets
    that failed to reproduce the stored file (it must stay empty).
    """
    params = state.params
    addresses = list(params.addresses())
    if mode == "all":
        if count is not None:
            raise ParameterError("count only applies to mode='sample'")
        subsets = list(itertools.combinations(addresses, params.k))
    elif mode == "sample":
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ParameterError(f"sample mode needs a positive count, got {count!r}")
        rng = random.Random(seed)
        chosen: dict[tuple[tuple[int, int], ...], None] = {}
        attempts = 0
        while len(chosen) < count and attempts < 100 * count:
            chosen[tuple(sorted(rng.sample(addresses, params.k)))] = None
            attempts += 1
        subsets = list(chosen)
    else:
        raise ParameterError(f"mode must be 'all' or 'sample', got {mode!r}")

    failures = []
    for subset in subsets:
        try:
            cubic_code.recover_file(state, subset)
        except (CorruptionError, StructuralError, ParameterError) as exc:
            failures.append((subset, str(exc)))
    return RecoveryReport(mode=mode, checked=len(subsets), failures=failures)
