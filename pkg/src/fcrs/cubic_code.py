"""Repair-by-transfer code layout over clustered servers.

A system of n servers is split into s complete clusters of size d = n // s
plus one residual cluster of size s0 = n % s. Codeword coordinates are the
cells of an (s+1)-dimensional cube of side d, indexed by their base-d
digits: coordinate index l has digit (l // d**(i-1)) % d in position i.
Server j of cluster i stores every coordinate whose digit in position i
equals j, so any single server is rebuilt by verbatim copies from the d
servers of one other complete cluster. Residual servers hold data and can
fail and be repaired, but never act as helpers.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import galois_mds
from .errors import (
    CorruptionError,
    ParameterError,
    StructuralError,
    UnsupportedScaleError,
)

__all__ = [
    "ClusterParams",
    "CubicPlan",
    "ClusterState",
    "RepairTranscript",
    "MANIFEST_NAME",
    "plan_parameters",
    "gamma_cubic",
    "coverage_count",
    "coordinate_digits",
    "coordinate_index",
    "server_symbol_coords",
    "encode_file",
    "recover_file",
    "repair",
    "save_state",
    "load_state",
]

MANIFEST_NAME = "manifest.json"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClusterParams:
    """System geometry: n servers, k data units, s complete clusters.

    Valid when 2 <= s <= n // k and the residual cluster is smaller than
    both a complete cluster and the number of complete clusters. Any k
    servers must suffice to recover, and the system stays available while
    any s - 1 complete clusters survive.
    """

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
            raise ParameterError(f"need at least two complete clusters, got s={self.s}")
        if self.s * self.k > self.n:
            raise ParameterError(
                f"need s <= n // k so that one cluster loss leaves k servers, "
                f"got n={self.n}, k={self.k}, s={self.s}"
            )
        if self.n % self.s >= self.n // self.s:
            raise ParameterError(
                f"residual cluster ({self.n % self.s} servers) must be smaller "
                f"than a complete cluster ({self.n // self.s} servers)"
            )

    @property
    def d(self) -> int:
        """Servers per complete cluster."""
        return self.n // self.s

    @property
    def s0(self) -> int:
        """Servers in the residual cluster."""
        return self.n % self.s

    @property
    def availability(self) -> int:
        """Complete-cluster losses the system survives."""
        return self.s - 1

    def cluster_size(self, cluster: int) -> int:
        if 1 <= cluster <= self.s:
            return self.d
        if cluster == self.s + 1:
            return self.s0
        raise ParameterError(f"cluster {cluster} out of range 1..{self.s + 1}")

    def addresses(self) -> Iterator[tuple[int, int]]:
        """All server addresses (cluster, server), clusters 1-based, servers 0-based."""
        for i in range(1, self.s + 2):
            for j in range(self.cluster_size(i)):
                yield (i, j)

    def check_address(self, address: tuple[int, int]) -> tuple[int, int]:
        try:
            cluster, server = address
        except (TypeError, ValueError):
            raise ParameterError(f"server address must be a (cluster, server) pair, got {address!r}")
        if not (isinstance(cluster, int) and isinstance(server, int)):
            raise ParameterError(f"server address parts must be integers, got {address!r}")
        if not 1 <= cluster <= self.s + 1:
            raise ParameterError(f"cluster {cluster} out of range 1..{self.s + 1}")
        if not 0 <= server < self.cluster_size(cluster):
            raise ParameterError(
                f"server {server} out of range 0..{self.cluster_size(cluster) - 1} "
                f"in cluster {cluster}"
            )
        return (cluster, server)


def coordinate_digits(index: int, d: int, s: int) -> tuple[int, ...]:
    """Base-d digits (positions 1 .. s+1, least significant first) of a cube cell."""
    if d < 1 or s < 1:
        raise ParameterError("need d >= 1 and s >= 1")
    if not 0 <= index < d ** (s + 1):
        raise ParameterError(f"coordinate {index} out of range [0, {d ** (s + 1)})")
    digits = []
    for _ in range(s + 1):
        digits.append(index % d)
        index //= d
    return tuple(digits)


def coordinate_index(digits: Sequence[int], d: int) -> int:
    """Inverse of coordinate_digits."""
    if any(not 0 <= b < d for b in digits):
        raise ParameterError(f"digits {tuple(digits)} out of range [0, {d})")
    return sum(b * d**e for e, b in enumerate(digits))


@functools.lru_cache(maxsize=None)
def _digit_coords(d: int, s: int, position: int, value: int) -> np.ndarray:
    idx = np.arange(d ** (s + 1), dtype=np.int64)
    coords = idx[(idx // d**position) % d == value]
    coords.flags.writeable = False
    return coords


def server_symbol_coords(params: ClusterParams, cluster: int, server: int) -> np.ndarray:
    """Ascending coordinate indices stored by one server.

    Server j of cluster i holds the d**s cube cells whose digit in
    position i equals j. Expand an index to its digit tuple with
    coordinate_digits.
    """
    params.check_address((cluster, server))
    if params.d ** (params.s + 1) > galois_mds.GF_ORDER:
        raise UnsupportedScaleError(
            f"cube of side {params.d} in {params.s + 1} dimensions exceeds the field"
        )
    return _digit_coords(params.d, params.s, cluster - 1, server)


def _plan_profile(params: ClusterParams) -> tuple[int, tuple[int, ...], int]:
    """Regime, per-cluster selection profile, and message length, exact ints."""
    d, s, s0, k = params.d, params.s, params.s0, params.k
    if s0 >= k // (s + 1):
        regime = 1
        s1 = k % (s + 1)
        hi = -(-k // (s + 1))
        lo = k // (s + 1)
        kstar = (hi,) * s1 + (lo,) * (s + 1 - s1)
    else:
        regime = 2
        rem = k - s0
        s2 = rem % s
        hi = -(-rem // s)
        lo = rem // s
        kstar = (hi,) * s2 + (lo,) * (s - s2) + (s0,)
    m = d ** (s + 1) - math.prod(d - c for c in kstar)
    if sum(kstar) != k or any(c > d for c in kstar) or kstar[-1] > s0 and regime == 2:
        raise StructuralError(f"bad selection profile {kstar} for {params}")
    return regime, kstar, m


@dataclass(frozen=True)
class CubicPlan:
    """Resolved layout for one parameter choice.

    message_length is the number of data symbols per stripe, chosen as the
    worst-case coverage of k servers under the admissible selection profile
    that covers least. alpha_symbols and beta_symbols are per-stripe storage
    per server and repair transfer per helper.
    """

    params: ClusterParams
    regime: int
    kstar: tuple[int, ...]
    message_length: int
    code_length: int
    alpha_symbols: int
    beta_symbols: int

    @property
    def mds_spec(self) -> galois_mds.MdsCodeSpec:
        return galois_mds.MdsCodeSpec(self.code_length, self.message_length)


def plan_parameters(params: ClusterParams) -> CubicPlan:
    """Resolve the layout for params, or raise UnsupportedScaleError.

    The cube must fit in the symbol field: d**(s+1) <= 65536.
    """
    d, s = params.d, params.s
    code_length = d ** (s + 1)
    if code_length > galois_mds.GF_ORDER:
        raise UnsupportedScaleError(
            f"cube of side {d} in {s + 1} dimensions has {code_length} cells, "
            f"more than the field size {galois_mds.GF_ORDER}"
        )
    regime, kstar, m = _plan_profile(params)
    return CubicPlan(
        params=params,
        regime=regime,
        kstar=kstar,
        message_length=m,
        code_length=code_length,
        alpha_symbols=d**s,
        beta_symbols=d ** (s - 1),
    )


def gamma_cubic(params: ClusterParams) -> Fraction:
    """Repair bandwidth per unit of stored data, d**s / message_length.

    Exact rational, computed without materializing the layout, so it works
    at scales far beyond what plan_parameters accepts.
    """
    _, _, m = _plan_profile(params)
    return Fraction(params.d**params.s, m)


def coverage_count(d: int, s: int, profile: Sequence[int], s0: int | None = None) -> int:
    """Cube cells covered when profile[i] servers are picked from cluster i+1.

    profile has s+1 entries. Entries for complete clusters range over 0..d;
    the residual entry is capped by s0 when given, else by d. A cell is
    covered when some picked server stores it, so the uncovered count is
    the product of the per-position complements.
    """
    if d < 1 or s < 1:
        raise ParameterError("need d >= 1 and s >= 1")
    profile = tuple(profile)
    if len(profile) != s + 1:
        raise ParameterError(f"profile must have {s + 1} entries, got {len(profile)}")
    last_cap = d if s0 is None else min(s0, d)
    for i, c in enumerate(profile):
        cap = d if i < s else last_cap
        if not isinstance(c, int) or not 0 <= c <= cap:
            raise ParameterError(f"profile entry {c} at position {i + 1} out of range 0..{cap}")
    return d ** (s + 1) - math.prod(d - c for c in profile)


@dataclass
class ClusterState:
    """In-memory contents of every server for one stored file.

    servers maps (cluster, server) to a (stripe_count, alpha_symbols)
    uint16 array whose columns follow server_symbol_coords order.
    """

    plan: CubicPlan
    stripe_count: int
    file_length: int
    sha256: str
    servers: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def params(self) -> ClusterParams:
        return self.plan.params


@dataclass(frozen=True)
class RepairTranscript:
    """What moved during one repair.

    per_helper maps helper server index to (coords, values) where coords
    are the cube cells that helper sent and values is the corresponding
    (stripe_count, beta_symbols) slice of its storage.
    """

    failed: tuple[int, int]
    helper_cluster: int
    per_helper: Mapping[int, tuple[np.ndarray, np.ndarray]]

    @property
    def symbols_moved(self) -> int:
        return sum(vals.size for _, vals in self.per_helper.values())


def encode_file(data: bytes, params: ClusterParams) -> ClusterState:
    """Stripe, encode, and place a byte string onto all n servers.

    Each stripe holds 2 * message_length bytes (symbols are 2 bytes); the
    last stripe is zero padded and an empty input still produces one
    stripe. The returned state records the input length and SHA-256 so
    recovery can verify itself.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise ParameterError(f"data must be bytes, got {type(data).__name__}")
    data = bytes(data)
    plan = plan_parameters(params)
    stripe_bytes = 2 * plan.message_length
    stripe_count = max(1, -(-len(data) // stripe_bytes))
    padded = data.ljust(stripe_count * stripe_bytes, b"\x00")
    messages = np.frombuffer(padded, dtype="<u2").reshape(stripe_count, plan.message_length)
    codes = galois_mds.rs_encode_batch(messages, plan.mds_spec)
    servers = {}
    for address in params.addresses():
        coords = server_symbol_coords(params, *address)
        servers[address] = np.ascontiguousarray(codes[:, coords])
    return ClusterState(
        plan=plan,
        stripe_count=stripe_count,
        file_length=len(data),
        sha256=hashlib.sha256(data).hexdigest(),
        servers=servers,
    )


def recover_file(state: ClusterState, servers: Iterable[tuple[int, int]]) -> bytes:
    """Rebuild the file from the contents of exactly k distinct servers.

    Decodes from the first message_length coordinates (ascending) of the
    union the chosen servers store, then checks length and SHA-256 against
    the manifest values. Insufficient coverage is a StructuralError since
    the layout guarantees any k servers suffice.
    """
    params = state.params
    chosen = [params.check_address(a) for a in servers]
    if len(set(chosen)) != len(chosen):
        raise ParameterError("recovery servers must be distinct")
    if len(chosen) != params.k:
        raise ParameterError(f"need exactly k={params.k} servers, got {len(chosen)}")
    plan = state.plan
    m = plan.message_length

    holder: dict[int, tuple[tuple[int, int], int]] = {}
    for address in chosen:
        coords = server_symbol_coords(params, *address)
        for col, c in enumerate(coords.tolist()):
            if c not in holder:
                holder[c] = (address, col)
    union = sorted(holder)
    if len(union) < m:
        raise StructuralError(
            f"servers {chosen} cover {len(union)} coordinates, need {m}"
        )
    take = union[:m]
    values = np.empty((state.stripe_count, m), dtype=np.uint16)
    for t, c in enumerate(take):
        address, col = holder[c]
        values[:, t] = state.servers[address][:, col]
    messages = galois_mds.rs_decode_batch(values, np.asarray(take), plan.mds_spec)
    data = np.ascontiguousarray(messages).astype("<u2", copy=False).tobytes()[: state.file_length]
    if len(data) != state.file_length:
        raise CorruptionError(
            f"recovered {len(data)} bytes, manifest says {state.file_length}"
        )
    digest = hashlib.sha256(data).hexdigest()
    if digest != state.sha256:
        raise CorruptionError("recovered content fails its SHA-256 check")
    return data


def repair(
    state: ClusterState, failed: tuple[int, int], helper_cluster: int
) -> RepairTranscript:
    """Rebuild one server from verbatim transfers out of one complete cluster.

    Helper server j of the helper cluster sends exactly the cells it shares
    with the failed server, beta_symbols per stripe. The d contributions
    are disjoint and their union is the failed server's full content, which
    replaces state.servers[failed] in place. The residual cluster may be
    repaired but never helps.
    """
    params = state.params
    failed = params.check_address(failed)
    if not isinstance(helper_cluster, int) or isinstance(helper_cluster, bool):
        raise ParameterError(f"helper cluster must be an integer, got {helper_cluster!r}")
    if not 1 <= helper_cluster <= params.s:
        raise ParameterError(
            f"helper cluster {helper_cluster} out of range 1..{params.s} "
            f"(the residual cluster cannot help)"
        )
    if helper_cluster == failed[0]:
        raise ParameterError(f"helper cluster must differ from the failed cluster {failed[0]}")

    d = params.d
    fail_pos = failed[0] - 1
    per_helper: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    pieces_coords = []
    pieces_values = []
    for j in range(d):
        coords = server_symbol_coords(params, helper_cluster, j)
        sel = np.flatnonzero((coords // d**fail_pos) % d == failed[1])
        sent_coords = coords[sel]
        sent_values = np.ascontiguousarray(state.servers[(helper_cluster, j)][:, sel])
        per_helper[j] = (sent_coords, sent_values)
        pieces_coords.append(sent_coords)
        pieces_values.append(sent_values)

    all_coords = np.concatenate(pieces_coords)
    order = np.argsort(all_coords)
    rebuilt_coords = all_coords[order]
    expected = server_symbol_coords(params, *failed)
    if not np.array_equal(rebuilt_coords, expected):
        raise StructuralError(f"helper transfers do not tile server {failed}")
    rebuilt = np.concatenate(pieces_values, axis=1)[:, order]
    state.servers[failed] = np.ascontiguousarray(rebuilt)
    return RepairTranscript(failed=failed, helper_cluster=helper_cluster, per_helper=per_helper)


def _server_filename(cluster: int, server: int) -> str:
    # external names are 1-based in both parts
    return f"c{cluster}_s{server + 1}.bin"


def save_state(state: ClusterState, directory: str | Path) -> None:
    """Write manifest.json plus one binary file per server.

    Server files are stripe-major, coordinate-ascending, little-endian
    2-byte symbols. File names use 1-based cluster and server numbers.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    params = state.params
    manifest = {
        "version": _FORMAT_VERSION,
        "n": params.n,
        "k": params.k,
        "s": params.s,
        "d": params.d,
        "s0": params.s0,
        "m": state.plan.message_length,
        "regime": state.plan.regime,
        "stripe_count": state.stripe_count,
        "file_length": state.file_length,
        "sha256": state.sha256,
        "field_modulus": hex(galois_mds.GF_MODULUS),
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    for (cluster, server), array in state.servers.items():
        path = directory / _server_filename(cluster, server)
        path.write_bytes(np.ascontiguousarray(array).astype("<u2", copy=False).tobytes())


def load_state(directory: str | Path) -> ClusterState:
    """Read a directory written by save_state, checking manifest consistency."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise ParameterError(f"no {MANIFEST_NAME} in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptionError(f"manifest is not valid JSON: {exc}") from exc
    for key in ("version", "n", "k", "s", "d", "s0", "m", "regime",
                "stripe_count", "file_length", "sha256", "field_modulus"):
        if key not in manifest:
            raise CorruptionError(f"manifest missing key {key!r}")
    if manifest["version"] != _FORMAT_VERSION:
        raise CorruptionError(f"unsupported layout version {manifest['version']!r}")
    if manifest["field_modulus"] != hex(galois_mds.GF_MODULUS):
        raise CorruptionError(
            f"manifest field modulus {manifest['field_modulus']} does not match "
            f"{hex(galois_mds.GF_MODULUS)}"
        )
    params = ClusterParams(manifest["n"], manifest["k"], manifest["s"])
    plan = plan_parameters(params)
    derived = {
        "d": params.d,
        "s0": params.s0,
        "m": plan.message_length,
        "regime": plan.regime,
    }
    for key, expect in derived.items():
        if manifest[key] != expect:
            raise CorruptionError(
                f"manifest {key}={manifest[key]} disagrees with derived value {expect}"
            )
    stripe_count = manifest["stripe_count"]
    if not isinstance(stripe_count, int) or stripe_count < 1:
        raise CorruptionError(f"bad stripe_count {stripe_count!r}")
    servers = {}
    for address in params.addresses():
        path = directory / _server_filename(*address)
        if not path.is_file():
            raise CorruptionError(f"missing server file {path.name}")
        raw = path.read_bytes()
        expected_len = 2 * stripe_count * plan.alpha_symbols
        if len(raw) != expected_len:
            raise CorruptionError(
                f"{path.name} holds {len(raw)} bytes, expected {expected_len}"
            )
        servers[address] = np.frombuffer(raw, dtype="<u2").reshape(
            stripe_count, plan.alpha_symbols
        ).copy()
    return ClusterState(
        plan=plan,
        stripe_count=stripe_count,
        file_length=manifest["file_length"],
        sha256=manifest["sha256"],
        servers=servers,
    )
