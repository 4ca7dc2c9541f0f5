"""GF(2^16) arithmetic and a Reed-Solomon codec used as the MDS base layer.

Symbols are integers in [0, 65536) and serialize as little-endian 2-byte
values. Multiplication runs over log/antilog tables built once at import
time; the bulk encode/decode paths hand those tables to compiled kernels
(see _gf_kernels, imported lazily so analysis-only callers skip the JIT).

A length-N codeword is the evaluation of the message polynomial (message
word c is the coefficient of x^c) at the field elements 0 .. N-1, so any
m distinct coordinates recover the message by interpolation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CorruptionError, InsufficientDataError, ParameterError

__all__ = [
    "GF_ORDER",
    "GF_MODULUS",
    "MdsCodeSpec",
    "field_add",
    "field_mul",
    "field_inverse",
    "rs_encode",
    "rs_decode",
    "rs_encode_batch",
    "rs_decode_batch",
    "interpolation_matrix",
]

GF_ORDER = 1 << 16
# x^16 + x^12 + x^3 + x + 1, primitive over GF(2), generator 2
GF_MODULUS = 0x1100B

# log(0) sentinel. It exceeds any sum of two real logs (max 2 * 65534),
# so products involving zero land in the zeroed tail of the padded
# antilog table and multiplication needs no zero branch.
_ZERO_LOG = 131071


def _mul_refimpl(a: int, b: int) -> int:
    """Shift-and-add product, independent of the tables (used to build them)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & GF_ORDER:
            a ^= GF_MODULUS
    return r


def _build_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    exp = np.zeros(GF_ORDER - 1, dtype=np.uint16)
    log = np.full(GF_ORDER, _ZERO_LOG, dtype=np.uint32)
    x = 1
    for i in range(GF_ORDER - 1):
        if log[x] != _ZERO_LOG:
            raise AssertionError("generator cycles early; modulus is not primitive")
        exp[i] = x
        log[x] = i
        x = _mul_refimpl(x, 2)
    if x != 1:
        raise AssertionError("generator does not return to 1; modulus is not primitive")
    # Padded antilog covering any sum of two table entries: real products
    # read exp[(la + lb) % 65535] from the front, anything touching the
    # zero sentinel reads 0 from the tail.
    pad = np.zeros(2 * _ZERO_LOG + 1, dtype=np.uint16)
    reach = 2 * (GF_ORDER - 2)
    pad[: reach + 1] = exp[np.arange(reach + 1) % (GF_ORDER - 1)]
    return exp, log, pad


_EXP, _LOG, _EXP_PAD = _build_tables()


def _check_symbol(a: int) -> int:
    if not isinstance(a, (int, np.integer)) or isinstance(a, bool):
        raise ParameterError(f"field symbol must be an integer, got {type(a).__name__}")
    if not 0 <= a < GF_ORDER:
        raise ParameterError(f"field symbol {a} out of range [0, {GF_ORDER})")
    return int(a)


def field_add(a: int, b: int) -> int:
    """Sum (and difference) of two field symbols: bitwise xor."""
    return _check_symbol(a) ^ _check_symbol(b)


def field_mul(a: int, b: int) -> int:
    """Product of two field symbols."""
    a = _check_symbol(a)
    b = _check_symbol(b)
    return int(_EXP_PAD[int(_LOG[a]) + int(_LOG[b])])


def field_inverse(a: int) -> int:
    """Multiplicative inverse of a nonzero field symbol."""
    a = _check_symbol(a)
    if a == 0:
        raise ParameterError("zero has no multiplicative inverse")
    return int(_EXP[(GF_ORDER - 1 - int(_LOG[a])) % (GF_ORDER - 1)])


def _mul_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # elementwise product of uint16 arrays; log sums stay below uint32 range
    return _EXP_PAD[_LOG[a] + _LOG[b]]


@dataclass(frozen=True)
class MdsCodeSpec:
    """Parameters of one Reed-Solomon instance.

    code_length is the number of codeword coordinates N (evaluation points
    are the field elements 0 .. N-1), message_length is the number of data
    symbols m per stripe.
    """

    code_length: int
    message_length: int

    def __post_init__(self) -> None:
        n, m = self.code_length, self.message_length
        if not (isinstance(n, int) and isinstance(m, int)):
            raise ParameterError("code dimensions must be integers")
        if not 1 <= m <= n:
            raise ParameterError(f"need 1 <= message_length <= code_length, got m={m}, N={n}")
        if n > GF_ORDER:
            raise ParameterError(f"code_length {n} exceeds the field size {GF_ORDER}")


@functools.lru_cache(maxsize=None)
def _vandermonde(code_length: int, message_length: int) -> np.ndarray:
    # V[c, l] = l**c, so codeword = message @ V evaluates the message
    # polynomial at every coordinate
    v = np.empty((message_length, code_length), dtype=np.uint16)
    v[0] = 1
    if message_length > 1:
        points = np.arange(code_length, dtype=np.uint16)
        v[1] = points
        for c in range(2, message_length):
            v[c] = _mul_vec(v[c - 1], points)
    v.flags.writeable = False
    return v


def _check_batch(values: np.ndarray, width: int, what: str) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim != 2:
        raise ParameterError(f"{what} must be a 2-d array, got shape {values.shape}")
    if values.shape[1] != width:
        raise ParameterError(f"{what} must have {width} columns, got {values.shape[1]}")
    if values.dtype != np.uint16:
        if not np.issubdtype(values.dtype, np.integer):
            raise ParameterError(f"{what} must hold integers")
        if values.size and (values.min() < 0 or values.max() >= GF_ORDER):
            raise ParameterError(f"{what} entries out of range [0, {GF_ORDER})")
        values = values.astype(np.uint16)
    return np.ascontiguousarray(values)


def _check_coords(coords: Sequence[int] | np.ndarray, spec: MdsCodeSpec) -> np.ndarray:
    coords = np.asarray(coords)
    if coords.ndim != 1:
        raise ParameterError("coordinate list must be 1-d")
    if coords.size != spec.message_length:
        raise ParameterError(
            f"need exactly {spec.message_length} coordinates, got {coords.size}"
        )
    if not np.issubdtype(coords.dtype, np.integer):
        raise ParameterError("coordinates must be integers")
    if coords.size and (coords.min() < 0 or coords.max() >= spec.code_length):
        raise ParameterError(f"coordinates out of range [0, {spec.code_length})")
    if np.unique(coords).size != coords.size:
        raise ParameterError("coordinates must be distinct")
    return np.ascontiguousarray(coords.astype(np.uint16))


def rs_encode_batch(messages: np.ndarray, spec: MdsCodeSpec) -> np.ndarray:
    """Encode a (stripes, m) uint16 array into a (stripes, N) codeword array."""
    messages = _check_batch(messages, spec.message_length, "message batch")
    from . import _gf_kernels

    return _gf_kernels.matmul(
        messages, _vandermonde(spec.code_length, spec.message_length), _LOG, _EXP_PAD
    )


def interpolation_matrix(coords: Sequence[int] | np.ndarray, spec: MdsCodeSpec) -> np.ndarray:
    """Matrix B with messages = values @ B for values read at these coordinates.

    Column c of row p holds the coefficient of x^c in the Lagrange basis
    polynomial that is 1 at coordinate p and 0 at the others.
    """
    coords = _check_coords(coords, spec)
    from . import _gf_kernels

    return _gf_kernels.interp_matrix(coords, _LOG, _EXP_PAD)


def rs_decode_batch(
    values: np.ndarray, coords: Sequence[int] | np.ndarray, spec: MdsCodeSpec
) -> np.ndarray:
    """Recover (stripes, m) messages from values read at m distinct coordinates."""
    values = _check_batch(values, spec.message_length, "value batch")
    basis = interpolation_matrix(coords, spec)
    from . import _gf_kernels

    return _gf_kernels.matmul(values, basis, _LOG, _EXP_PAD)


def rs_encode(message: Sequence[int], spec: MdsCodeSpec) -> list[int]:
    """Encode one message (length m) into one codeword (length N)."""
    msg = np.asarray([_check_symbol(x) for x in message], dtype=np.uint16)
    if msg.size != spec.message_length:
        raise ParameterError(
            f"message length {msg.size} does not match spec m={spec.message_length}"
        )
    return rs_encode_batch(msg[None, :], spec)[0].tolist()


def _poly_eval(coeffs: np.ndarray, x: int) -> int:
    acc = 0
    for c in coeffs[::-1]:
        acc = int(_EXP_PAD[int(_LOG[acc]) + int(_LOG[x])]) ^ int(c)
    return acc


def rs_decode(points: Iterable[tuple[int, int]], spec: MdsCodeSpec) -> list[int]:
    """Recover one message from (coordinate, value) pairs.

    Needs at least m pairs with distinct coordinates. The first m pairs fix
    the message; every surplus pair is checked against it and a mismatch
    raises CorruptionError. Duplicate coordinates are rejected.
    """
    pts = list(points)
    for idx, val in pts:
        _check_symbol(val)
        if not isinstance(idx, (int, np.integer)) or isinstance(idx, bool):
            raise ParameterError("coordinate must be an integer")
        if not 0 <= idx < spec.code_length:
            raise ParameterError(f"coordinate {idx} out of range [0, {spec.code_length})")
    indices = [int(idx) for idx, _ in pts]
    if len(set(indices)) != len(indices):
        raise ParameterError("duplicate coordinates in decode input")
    m = spec.message_length
    if len(pts) < m:
        raise InsufficientDataError(f"need {m} points to decode, got {len(pts)}")
    head = pts[:m]
    coords = np.asarray([idx for idx, _ in head], dtype=np.uint16)
    vals = np.asarray([val for _, val in head], dtype=np.uint16)
    message = rs_decode_batch(vals[None, :], coords, spec)[0]
    for idx, val in pts[m:]:
        if _poly_eval(message, int(idx)) != int(val):
            raise CorruptionError(
                f"surplus point at coordinate {idx} disagrees with the interpolated message"
            )
    return message.tolist()
