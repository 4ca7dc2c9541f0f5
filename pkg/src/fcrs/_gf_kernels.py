"""Compiled bulk kernels for GF(2^16) table arithmetic.

Kept in a separate module so importing the package (or running the
analysis-only code paths) never pays the numba import or JIT cost.
Tables are passed in explicitly; module-level kernels with cache=True
persist their compilation across processes.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def _matmul_kernel(a, log_bt, log, exp_pad):
    rows, inner = a.shape
    cols = log_bt.shape[0]
    out = np.empty((rows, cols), np.uint16)
    for r in prange(rows):
        la = np.empty(inner, np.uint32)
        for t in range(inner):
            la[t] = log[a[r, t]]
        for c in range(cols):
            lb = log_bt[c]
            acc = np.uint16(0)
            for t in range(inner):
                acc ^= exp_pad[la[t] + lb[t]]
            out[r, c] = acc
    return out


@njit(cache=True)
def _interp_kernel(xs, log, exp_pad):
    m = xs.shape[0]
    # master polynomial prod_p (x + x_p), ascending coefficients, monic
    master = np.zeros(m + 1, np.uint16)
    master[0] = 1
    for p in range(m):
        lx = log[xs[p]]
        for i in range(p, -1, -1):
            c = master[i]
            master[i + 1] ^= c
            master[i] = exp_pad[log[c] + lx]
    out = np.empty((m, m), np.uint16)
    q = np.empty(m, np.uint16)
    for p in range(m):
        lx = log[xs[p]]
        # q = master / (x + x_p) by synthetic division
        q[m - 1] = master[m]
        for i in range(m - 1, 0, -1):
            q[i - 1] = master[i] ^ exp_pad[log[q[i]] + lx]
        # scale by 1 / q(x_p) so the basis polynomial is 1 at x_p
        acc = q[m - 1]
        for i in range(m - 2, -1, -1):
            acc = exp_pad[log[acc] + lx] ^ q[i]
        linv = np.uint32(65535) - log[acc]
        for i in range(m):
            out[p, i] = exp_pad[log[q[i]] + linv]
    return out


def matmul(a: np.ndarray, b: np.ndarray, log: np.ndarray, exp_pad: np.ndarray) -> np.ndarray:
    """Product of uint16 matrices a (R, K) and b (K, C) over the field."""
    log_bt = np.ascontiguousarray(log[b].T)
    return _matmul_kernel(np.ascontiguousarray(a), log_bt, log, exp_pad)


def interp_matrix(xs: np.ndarray, log: np.ndarray, exp_pad: np.ndarray) -> np.ndarray:
    """Lagrange interpolation matrix for distinct evaluation points xs."""
    return _interp_kernel(np.ascontiguousarray(xs), log, exp_pad)
