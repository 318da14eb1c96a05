"""Numba twins of the numpy pairwise loops.

Parallelism is over independent output entries only; the per-entry sums run
sequentially, so results are identical for any thread count.  First call
pays JIT compilation; ``cache=True`` persists the compiled kernels.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def pair_kernel_mean(FA, FB, kind, sigma, T):
    n, L = FA.shape
    m = FB.shape[0]
    out = np.empty((n, m))
    c = 0.0
    if kind == 0:
        c = 1.0 / np.sqrt(2.0 * np.pi * sigma)
    for i in prange(n):
        for j in range(m):
            acc = 0.0
            for l in range(L):
                a = FA[i, l]
                b = FB[j, l]
                if kind == 0:
                    d = a - b
                    acc += c * np.exp(-d * d / (2.0 * sigma))
                elif kind == 1:
                    acc += T - max(a, b)
                else:
                    hi = max(a, b)
                    g = hi - min(a, b)
                    v = T - hi
                    if g < 2.0 * sigma:
                        t = g - 2.0 * sigma
                        v += t * t * t / (24.0 * sigma * sigma)
                    acc += v
            out[i, j] = acc / L
    return out


@njit(cache=True, parallel=True)
def pair_dk_weighted(FZ, FW, w, kind, sigma, T):
    R, L = FZ.shape
    S = FW.shape[0]
    out = np.empty((R, L))
    c = 0.0
    if kind == 0:
        c = 1.0 / np.sqrt(2.0 * np.pi * sigma)
    for r in prange(R):
        for l in range(L):
            a = FZ[r, l]
            acc = 0.0
            for s in range(S):
                b = FW[s, l]
                if kind == 0:
                    d = a - b
                    acc += w[s] * (-(d / sigma)) * c * np.exp(-d * d / (2.0 * sigma))
                elif kind == 1:
                    if a > b:
                        acc -= w[s]
                    elif a == b:
                        acc -= 0.5 * w[s]
                else:
                    g = abs(a - b)
                    q = 0.0
                    if g < 2.0 * sigma:
                        t = g - 2.0 * sigma
                        q = t * t / (8.0 * sigma * sigma)
                    if a > b:
                        acc += w[s] * (-1.0 + q)
                    elif a == b:
                        acc -= 0.5 * w[s]
                    else:
                        acc -= w[s] * q
            out[r, l] = acc
    return out
