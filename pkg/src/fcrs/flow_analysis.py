"""Functional-repair analysis over explicit information-flow graphs.

A stored file survives a sequence of single-server failures and repairs
when every data collector (any k servers at the final time) still sees the
whole file through the graph that models storage (capacity alpha per
server) and repair transfers (capacity beta per helper). This module
evaluates that cut exactly: a lower bound on any one failure sequence, an
exhaustive minimum over all sequences and collectors, a closed form for
the global minimum, and the storage/bandwidth trade-off it induces.

All quantities are exact rationals normalized to file size 1.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cubic_code import ClusterParams
from .errors import InfeasibleError, ParameterError, StructuralError

__all__ = [
    "INFINITE",
    "CutSequence",
    "FailureEvent",
    "FlowInstance",
    "FlowGraph",
    "TradeoffPoint",
    "SweepPoint",
    "fstar_sequence",
    "fstar_closed",
    "twin_sequence",
    "build_flow_graph",
    "min_cut",
    "sweep_min_cut",
    "tradeoff_thresholds",
    "tradeoff_alpha",
    "mbr_point",
    "tradeoff_csv",
    "format_decimal",
]

INFINITE = math.inf

_SOURCE = "source"
_SINK = "collector"


def _rational(value, name: str) -> Fraction:
    try:
        out = Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a rational number, got {value!r}") from exc
    if out < 0:
        raise ParameterError(f"{name} must be nonnegative, got {value}")
    return out


def format_decimal(value) -> str:
    """Fixed formatting for emitted tables: 12 significant digits."""
    return f"{float(value):.12g}"


@dataclass(frozen=True)
class CutSequence:
    """Cluster labels of a collector's servers, ordered by repair time."""

    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        for lab in self.labels:
            if not isinstance(lab, int) or isinstance(lab, bool) or lab < 1:
                raise ParameterError(f"cluster label {lab!r} must be a positive integer")

    def count(self, cluster: int, upto: int) -> int:
        """Occurrences of cluster among the first upto labels."""
        return sum(1 for lab in self.labels[:upto] if lab == cluster)


@dataclass(frozen=True)
class FailureEvent:
    """One failure and its repair: at the end of slot t, server failed
    is rebuilt with transfers from every server of helper_cluster."""

    slot: int
    failed: tuple[int, int]
    helper_cluster: int


@dataclass(frozen=True)
class TradeoffPoint:
    """One feasible (bandwidth, storage) pair, both normalized to file size 1."""

    gamma: Fraction
    alpha: Fraction


@dataclass(frozen=True)
class FlowInstance:
    """A concrete failure history plus the collector that reads at the end."""

    params: ClusterParams
    events: tuple[FailureEvent, ...]
    collector: tuple[tuple[int, int], ...]
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _rational(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _rational(self.beta, "beta"))
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        p = self.params
        for t, ev in enumerate(events, start=1):
            if not isinstance(ev, FailureEvent):
                raise ParameterError(f"events must be FailureEvents, got {ev!r}")
            if ev.slot != t:
                raise ParameterError(
                    f"event slots must run 1..{len(events)} in order, got slot "
                    f"{ev.slot} at position {t}"
                )
            p.check_address(ev.failed)
            if not 1 <= ev.helper_cluster <= p.s:
                raise ParameterError(
                    f"helper cluster {ev.helper_cluster} out of range 1..{p.s}"
                )
            if ev.helper_cluster == ev.failed[0]:
                raise ParameterError(
                    f"slot {ev.slot}: helper cluster equals the failed cluster"
                )
        collector = tuple(sorted(p.check_address(a) for a in self.collector))
        if len(set(collector)) != len(collector):
            raise ParameterError("collector servers must be distinct")
        if len(collector) != p.k:
            raise ParameterError(
                f"collector must hold exactly k={p.k} servers, got {len(collector)}"
            )
        object.__setattr__(self, "collector", collector)


@dataclass(frozen=True)
class FlowGraph:
    """Capacitated directed graph; capacities are Fractions or INFINITE."""

    source: object
    sink: object
    edges: tuple[tuple[object, object, object], ...]


def fstar_sequence(e, alpha, beta, d: int, s: int) -> Fraction:
    """Cut lower bound for one label sequence, evaluated literally.

    Term j is min{(d - max over other clusters of their count so far) * beta,
    alpha}; summing over the sequence bounds the cut below any collector
    whose servers were repaired in this cluster order.
    """
    labels = e.labels if isinstance(e, CutSequence) else tuple(e)
    alpha = _rational(alpha, "alpha")
    beta = _rational(beta, "beta")
    if not isinstance(d, int) or d < 1:
        raise ParameterError(f"need integer d >= 1, got {d!r}")
    if not isinstance(s, int) or s < 1:
        raise ParameterError(f"need integer s >= 1, got {s!r}")
    counts: dict[int, int] = {}
    total = Fraction(0)
    for lab in labels:
        if not isinstance(lab, int) or isinstance(lab, bool) or not 1 <= lab <= s + 1:
            raise ParameterError(f"cluster label {lab!r} out of range 1..{s + 1}")
        counts[lab] = counts.get(lab, 0) + 1
        peak = max((c for i, c in counts.items() if i != lab), default=0)
        total += min((d - peak) * beta, alpha)
    return total


def _pair_cut(k1: int, alpha: Fraction, beta: Fraction, d: int, k: int) -> Fraction:
    # cut of the two-cluster pattern with k1 early and k - k1 late failures
    return k1 * alpha + (d - k1) * (k - k1) * beta


def fstar_closed(alpha, beta, d: int, k: int) -> Fraction:
    """Global minimum cut over every failure sequence and collector.

    The minimizing pattern splits the collector between two clusters, so the
    value is the best two-cluster cut, never above the all-storage cut k*alpha
    or the bandwidth-saturated cut (kd - floor(k/2)*ceil(k/2)) * beta. The
    continuous minimizer of the two-cluster cut sits at (d + k - alpha/beta)/2;
    an exact half-integer leaves two equal integer neighbors and we take the
    lower one.
    """
    alpha = _rational(alpha, "alpha")
    beta = _rational(beta, "beta")
    if not isinstance(d, int) or d < 1:
        raise ParameterError(f"need integer d >= 1, got {d!r}")
    if not isinstance(k, int) or not 1 <= k <= d:
        raise ParameterError(f"need integer 1 <= k <= d, got k={k!r}, d={d}")
    if beta == 0:
        # helpers move nothing, so only the k storage edges can carry the file
        return k * alpha
    k_alpha = k * alpha
    saturated = (k * d - (k // 2) * ((k + 1) // 2)) * beta
    pivot = (d + k - alpha / beta) / 2
    k1 = math.ceil(pivot - Fraction(1, 2))
    if pivot.denominator == 2:
        assert _pair_cut(k1, alpha, beta, d, k) == _pair_cut(k1 + 1, alpha, beta, d, k)
    k1 = max((k + 1) // 2, min(k1, k))
    return min(_pair_cut(k1, alpha, beta, d, k), k_alpha, saturated)


def twin_sequence(params: ClusterParams, k1: int, *, alpha, beta) -> FlowInstance:
    """The canonical minimizing history: k1 failures in cluster 1 repaired by
    cluster 2, then k - k1 failures in cluster 2 repaired by cluster 1, with
    the k newcomers as collector.
    """
    k, d = params.k, params.d
    if not isinstance(k1, int) or isinstance(k1, bool):
        raise ParameterError(f"k1 must be an integer, got {k1!r}")
    if not (k + 1) // 2 <= k1 <= k:
        raise ParameterError(f"need ceil(k/2) <= k1 <= k, got k1={k1}, k={k}")
    if k1 > d or k - k1 > d:
        raise ParameterError(f"k1={k1} splits k={k} beyond cluster size d={d}")
    events = []
    for j in range(k1):
        events.append(FailureEvent(slot=j + 1, failed=(1, j), helper_cluster=2))
    for j in range(k - k1):
        events.append(FailureEvent(slot=k1 + j + 1, failed=(2, j), helper_cluster=1))
    collector = tuple((1, j) for j in range(k1)) + tuple((2, j) for j in range(k - k1))
    return FlowInstance(
        params=params,
        events=tuple(events),
        collector=collector,
        alpha=alpha,
        beta=beta,
    )


def build_flow_graph(instance: FlowInstance) -> FlowGraph:
    """Expand an instance into its capacitated graph.

    Every server at every slot is an in/out node pair. Storage limits flow
    between the pair (capacity alpha, placed at creation and at each repair);
    a repaired server draws capacity-beta edges from the previous slot's out
    node of every helper; servers untouched in a slot carry forward through
    infinite edges. The collector hangs off the final out nodes.
    """
    p = instance.params
    alpha, beta = instance.alpha, instance.beta
    addresses = list(p.addresses())
    edges: list[tuple[object, object, object]] = []
    for c, j in addresses:
        edges.append((_SOURCE, ("in", c, j, 0), INFINITE))
        edges.append((("in", c, j, 0), ("out", c, j, 0), alpha))
    for ev in instance.events:
        t = ev.slot
        for c, j in addresses:
            if (c, j) == ev.failed:
                continue
            edges.append((("in", c, j, t - 1), ("in", c, j, t), INFINITE))
            edges.append((("out", c, j, t - 1), ("out", c, j, t), INFINITE))
        fc, fj = ev.failed
        for j in range(p.d):
            edges.append((("out", ev.helper_cluster, j, t - 1), ("in", fc, fj, t), beta))
        edges.append((("in", fc, fj, t), ("out", fc, fj, t), alpha))
    final = len(instance.events)
    for c, j in instance.collector:
        edges.append((("out", c, j, final), _SINK, INFINITE))
    return FlowGraph(source=_SOURCE, sink=_SINK, edges=tuple(edges))


class _IntDinic:
    """Max flow with integer capacities on an adjacency-list residual graph."""

    def __init__(self, node_count: int):
        self.adj: list[list[int]] = [[] for _ in range(node_count)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, capacity: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(capacity)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def _levels(self, source: int, sink: int) -> list[int] | None:
        level = [-1] * len(self.adj)
        level[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for eid in self.adj[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[sink] >= 0 else None

    def _push(self, u: int, sink: int, limit: int, level: list[int], it: list[int]) -> int:
        if u == sink:
            return limit
        while it[u] < len(self.adj[u]):
            eid = self.adj[u][it[u]]
            v = self.to[eid]
            if self.cap[eid] > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, sink, min(limit, self.cap[eid]), level, it)
                if pushed:
                    self.cap[eid] -= pushed
                    self.cap[eid ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0

    def max_flow(self, source: int, sink: int, stop_at: int) -> int:
        flow = 0
        while flow < stop_at:
            level = self._levels(source, sink)
            if level is None:
                break
            it = [0] * len(self.adj)
            while True:
                pushed = self._push(source, sink, stop_at - flow, level, it)
                if not pushed:
                    break
                flow += pushed
                if flow >= stop_at:
                    return flow
        return flow


def min_cut(graph: FlowGraph) -> Fraction:
    """Exact max-flow value of the graph (equals its minimum cut).

    Capacities are scaled to integers by the least common denominator; a
    flow that reaches the sum of all finite capacities plus one means no
    finite cut separates source from sink, which the construction forbids.
    """
    def is_infinite(cap) -> bool:
        return cap is INFINITE or (isinstance(cap, float) and math.isinf(cap))

    finite = [
        _rational(cap, "edge capacity")
        for _, _, cap in graph.edges
        if not is_infinite(cap)
    ]
    scale = math.lcm(*(c.denominator for c in finite)) if finite else 1
    unbounded = sum(int(c * scale) for c in finite) + 1

    index: dict[object, int] = {}

    def node_id(node: object) -> int:
        if node not in index:
            index[node] = len(index)
        return index[node]

    source = node_id(graph.source)
    sink = node_id(graph.sink)
    resolved = [(node_id(u), node_id(v), cap) for u, v, cap in graph.edges]
    dinic = _IntDinic(len(index))
    for u, v, cap in resolved:
        dinic.add(u, v, unbounded if is_infinite(cap) else int(Fraction(cap) * scale))
    flow = dinic.max_flow(source, sink, unbounded)
    if flow >= unbounded:
        raise StructuralError("no finite cut separates source from collector")
    return Fraction(flow, scale)


@dataclass(frozen=True)
class SweepPoint:
    """Exhaustive-sweep result at one (alpha, beta): the global minimum cut,
    the best twin-pattern cut, and the closed form, which must all agree."""

    alpha: Fraction
    beta: Fraction
    minimum: Fraction
    twin_minimum: Fraction
    closed_form: Fraction
    class_count: int


def _canonical_key(params: ClusterParams, seq, collector):
    # Relabel complete clusters and servers by first appearance. The key is
    # itself a valid instance isomorphic to the input, so equal keys always
    # mean isomorphic instances and the minimum cut is preserved.
    s = params.s
    cluster_map: dict[int, int] = {}
    server_map: dict[tuple[int, int], int] = {}
    server_next: dict[int, int] = {}

    def map_cluster(c: int) -> int:
        if c > s:
            return c
        if c not in cluster_map:
            cluster_map[c] = len(cluster_map) + 1
        return cluster_map[c]

    def map_server(c: int, j: int) -> int:
        key = (c, j)
        if key not in server_map:
            nxt = server_next.get(c, 0)
            server_map[key] = nxt
            server_next[c] = nxt + 1
        return server_map[key]

    events = tuple(
        (map_cluster(c), map_server(c, j), map_cluster(h)) for (c, j), h in seq
    )
    mapped = [(map_cluster(c), map_server(c, j)) for c, j in collector]
    return events, tuple(sorted(mapped))


def _instance_classes(params: ClusterParams, max_len: int):
    addresses = list(params.addresses())
    choices = [
        (a, h)
        for a in addresses
        for h in range(1, params.s + 1)
        if h != a[0]
    ]
    collectors = list(itertools.combinations(addresses, params.k))
    seen = set()
    classes = []
    for length in range(max_len + 1):
        for seq in itertools.product(choices, repeat=length):
            for col in collectors:
                key = _canonical_key(params, seq, col)
                if key not in seen:
                    seen.add(key)
                    classes.append(key)
    return classes


def _key_instance(params: ClusterParams, key, alpha: Fraction, beta: Fraction) -> FlowInstance:
    events, collector = key
    return FlowInstance(
        params=params,
        events=tuple(
            FailureEvent(slot=t + 1, failed=(c, j), helper_cluster=h)
            for t, (c, j, h) in enumerate(events)
        ),
        collector=collector,
        alpha=alpha,
        beta=beta,
    )


def sweep_min_cut(
    params: ClusterParams,
    ratio_pairs: Iterable[tuple],
    max_len: int | None = None,
) -> list[SweepPoint]:
    """Minimum cut over every failure sequence and collector, per (alpha, beta).

    Sequences range over all (failed server, helper cluster) choices per slot
    up to length max_len (default k, which the minimizing patterns never
    exceed); collectors over all k-subsets. Isomorphic instances are folded
    together before solving. Deterministic for a given argument order.
    """
    if max_len is None:
        max_len = params.k
    if not isinstance(max_len, int) or max_len < 0:
        raise ParameterError(f"max_len must be a nonnegative integer, got {max_len!r}")
    classes = _instance_classes(params, max_len)
    d, k = params.d, params.k
    points = []
    for a, b in ratio_pairs:
        alpha = _rational(a, "alpha")
        beta = _rational(b, "beta")
        best = None
        for key in classes:
            value = min_cut(build_flow_graph(_key_instance(params, key, alpha, beta)))
            if best is None or value < best:
                best = value
        twin_best = None
        for k1 in range((k + 1) // 2, min(k, d) + 1):
            if k - k1 > d:
                continue
            instance = twin_sequence(params, k1, alpha=alpha, beta=beta)
            value = min_cut(build_flow_graph(instance))
            if twin_best is None or value < twin_best:
                twin_best = value
        points.append(
            SweepPoint(
                alpha=alpha,
                beta=beta,
                minimum=best,
                twin_minimum=twin_best,
                closed_form=fstar_closed(alpha, beta, d, k),
                class_count=len(classes),
            )
        )
    return points


def tradeoff_thresholds(d: int, k: int) -> list[Fraction]:
    """Bandwidth breakpoints of the trade-off, descending; the last entry is
    the smallest feasible bandwidth (the MBR point)."""
    if not isinstance(d, int) or d < 1:
        raise ParameterError(f"need integer d >= 1, got {d!r}")
    if not isinstance(k, int) or not 1 <= k <= d:
        raise ParameterError(f"need integer 1 <= k <= d, got k={k!r}, d={d}")
    half = k // 2
    out = [Fraction(d, (2 * k - i - 1) * i + k * (d - k + 1)) for i in range(half)]
    out.append(Fraction(d, k * d - half * (k - half)))
    return out


def tradeoff_alpha(gamma, d: int, k: int) -> Fraction:
    """Smallest feasible storage per server at repair bandwidth gamma.

    Piecewise linear and non-increasing in gamma; flat at 1/k once gamma
    clears the first breakpoint. Below the last breakpoint no storage size
    satisfies the cut bound and InfeasibleError is raised.
    """
    gamma = _rational(gamma, "gamma")
    thresholds = tradeoff_thresholds(d, k)
    if gamma < thresholds[-1]:
        raise InfeasibleError(
            f"gamma={gamma} is below the minimum feasible bandwidth {thresholds[-1]}"
        )
    if gamma >= thresholds[0]:
        return Fraction(1, k)
    for i in range(1, len(thresholds)):
        if gamma >= thresholds[i]:
            return (1 - Fraction(i, d) * (d - k + i) * gamma) / (k - i)
    raise StructuralError("threshold scan fell through")  # unreachable


def mbr_point(params: ClusterParams) -> TradeoffPoint:
    """The minimum-bandwidth point of the trade-off, where storage equals
    bandwidth: gamma = alpha = d / (kd - floor(k/2) * ceil(k/2))."""
    d, k = params.d, params.k
    gamma = Fraction(d, k * d - (k // 2) * (k - k // 2))
    return TradeoffPoint(gamma=gamma, alpha=gamma)


def tradeoff_csv(d: int, k: int, points: int) -> tuple[tuple[str, ...], list[tuple[str, ...]]]:
    """Header and rows for the trade-off curve sampled on points gammas,
    spanning the feasible range up to 1.1x the first breakpoint."""
    if not isinstance(points, int) or points < 2:
        raise ParameterError(f"need at least 2 grid points, got {points!r}")
    thresholds = tradeoff_thresholds(d, k)
    start = thresholds[-1]
    end = thresholds[0] * Fraction(11, 10)
    rows = []
    for i in range(points):
        gamma = start + (end - start) * Fraction(i, points - 1)
        rows.append((format_decimal(gamma), format_decimal(tradeoff_alpha(gamma, d, k))))
    return ("gamma", "alpha_fcrs"), rows
