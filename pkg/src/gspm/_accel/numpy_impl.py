"""Pure-numpy implementations of the pairwise slice-kernel loops.

Kinds (shared with the numba twin):
  0  identity operator + Gaussian profile:  c * exp(-(a-b)^2 / (2 sigma)),
     c = (2 pi sigma)^(-1/2); sigma is the variance of the difference
     Gaussian.
  1  cumulative operator + Dirac profile:   T - max(a, b).
  2  cumulative operator + order-0 smoothstep:  T - max + cubic overlap
     correction when |a - b| < 2 sigma.
"""

import numpy as np


def _slice_kernel(A, B, kind, sigma, T):
    # A, B broadcastable slice-value arrays
    if kind == 0:
        d = A - B
        return np.exp(-d * d / (2.0 * sigma)) / np.sqrt(2.0 * np.pi * sigma)
    if kind == 1:
        return T - np.maximum(A, B)
    if kind == 2:
        hi = np.maximum(A, B)
        g = hi - np.minimum(A, B)
        t = g - 2.0 * sigma
        correction = np.where(g < 2.0 * sigma, t * t * t / (24.0 * sigma * sigma), 0.0)
        return T - hi + correction
    raise ValueError(f"unknown kernel kind {kind}")


def _slice_kernel_dk(A, B, kind, sigma, T):
    # d/dA of _slice_kernel at (A, B)
    if kind == 0:
        d = A - B
        return -(d / sigma) * np.exp(-d * d / (2.0 * sigma)) / np.sqrt(2.0 * np.pi * sigma)
    if kind == 1:
        return np.where(A > B, -1.0, np.where(A == B, -0.5, 0.0))
    if kind == 2:
        g = np.abs(A - B)
        q = np.where(g < 2.0 * sigma, (g - 2.0 * sigma) ** 2 / (8.0 * sigma * sigma), 0.0)
        return np.where(A > B, -1.0 + q, np.where(A == B, -0.5, -q))
    raise ValueError(f"unknown kernel kind {kind}")


def pair_kernel_mean(FA, FB, kind, sigma, T):
    """Mean over slices of the slice kernel, for every (row of FA, row of FB).

    FA: (n, L), FB: (m, L) slice values.  Returns (n, m).
    """
    K = _slice_kernel(FA[:, None, :], FB[None, :, :], kind, sigma, T)
    return K.mean(axis=2)


def pair_dk_weighted(FZ, FW, w, kind, sigma, T):
    """Weighted sum over FW rows of d/da slice_kernel(a, b) per (row, slice).

    FZ: (R, L) evaluation slice values, FW: (S, L), w: (S,) weights.
    Returns (R, L): sum_s w[s] * D(FZ[r, l], FW[s, l]).
    """
    D = _slice_kernel_dk(FZ[:, None, :], FW[None, :, :], kind, sigma, T)
    return np.einsum("rsl,s->rl", D, w)
