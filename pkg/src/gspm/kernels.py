"""Slice-space kernels induced by (smoothing profile, linear operator) pairs.

A kernel between points x, y is the slice average of a 1D inner product

    k_theta(x, y) = < P(. - f_theta(x)), P(. - f_theta(y)) >,

where P is the smoothing profile pushed through the operator.  Three
(operator, smoothing) pairs have closed forms:

* identity + Gaussian:      c * exp(-(fx - fy)^2 / (2 sigma)),
  c = (2 pi sigma)^(-1/2).  ``sigma`` is the *variance* of the difference
  Gaussian (the profile itself is a Gaussian density with variance
  sigma / 2); this convention is the single source of truth for sigma
  sweeps everywhere in the package.
* cumulative + Dirac:       T - max(fx, fy) on the domain [-T, T].
* cumulative + smoothstep order 0:  T - max + cubic overlap correction
  when |fx - fy| < 2 sigma (sigma = ramp half-width).

Every other pair evaluates through a documented 1D trapezoid quadrature on
[-T, T] (2048 points by default) and is flagged as quadrature mode in
evaluation metadata.  Dirac under the identity operator is rejected: a
Dirac profile is not square-integrable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from . import _accel
from .errors import InvalidArgumentError, SliceRangeError, UnsupportedConfigError
from .slicing import SliceFamily, SliceSet, slice_gradients, slice_values

__all__ = [
    "SmoothingProfile",
    "OperatorSpec",
    "KernelSpec",
    "RbfKernel",
    "evaluation_mode",
    "resolve_half_width",
    "smoothstep",
    "smoothing_regularity_bound",
    "k_theta",
    "kernel",
    "kernel_cw",
    "kernel_gradient",
    "gram",
    "pairwise_matrix",
    "drift_coefficients",
    "rbf_matrix",
    "rbf_drift",
]


# ---------------------------------------------------------------------------
# smoothing profiles


@dataclass(frozen=True)
class SmoothingProfile:
    """Radial smoothing applied to empirical slices before the operator.

    kind "gaussian": sigma is the variance of the *difference* Gaussian, so
    the profile is N(0, sigma/2) and the slice kernel peaks at
    1/sqrt(2 pi sigma).  kind "smoothstep": sigma is the ramp half-width and
    order the polynomial order.  kind "dirac": no smoothing.
    """

    kind: str  # "gaussian" | "dirac" | "smoothstep"
    sigma: float = 0.0
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "dirac", "smoothstep"):
            raise InvalidArgumentError(f"unknown smoothing kind: {self.kind!r}")
        if self.kind in ("gaussian", "smoothstep") and not self.sigma > 0:
            raise InvalidArgumentError(f"{self.kind} smoothing requires sigma > 0")
        if self.kind == "smoothstep" and self.order < 0:
            raise InvalidArgumentError("smoothstep order must be >= 0")

    @classmethod
    def gaussian(cls, sigma: float) -> "SmoothingProfile":
        return cls("gaussian", sigma=sigma)

    @classmethod
    def dirac(cls) -> "SmoothingProfile":
        return cls("dirac")

    @classmethod
    def smoothstep_profile(cls, order: int, sigma: float) -> "SmoothingProfile":
        return cls("smoothstep", sigma=sigma, order=order)


def _smoothstep_coeffs(order: int) -> np.ndarray:
    n = order
    return np.array(
        [(-1.0) ** k * math.comb(n + k, k) * math.comb(2 * n + 1, n - k) for k in range(n + 1)]
    )


def smoothstep(order: int, sigma: float, x) -> np.ndarray:
    """Polynomial sigmoid ramp: 0 below -sigma, 1 above sigma, C^order inside."""
    t = np.clip((np.asarray(x, dtype=np.float64) + sigma) / (2.0 * sigma), 0.0, 1.0)
    coeffs = _smoothstep_coeffs(order)
    powers = order + 1 + np.arange(order + 1)
    return np.einsum("k,...k->...", coeffs, t[..., None] ** powers)


def smoothstep_bump(order: int, sigma: float, x) -> np.ndarray:
    """Derivative of the ramp: a compactly supported density on [-sigma, sigma]."""
    x = np.asarray(x, dtype=np.float64)
    t = (x + sigma) / (2.0 * sigma)
    inside = (t > 0.0) & (t < 1.0)
    coeffs = _smoothstep_coeffs(order)
    powers = order + np.arange(order + 1)
    tt = np.clip(t, 0.0, 1.0)
    val = np.einsum("k,...k->...", coeffs * (powers + 1), tt[..., None] ** powers)
    return np.where(inside, val / (2.0 * sigma), 0.0)


def _smoothstep_bump_deriv(order: int, sigma: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    t = (x + sigma) / (2.0 * sigma)
    inside = (t > 0.0) & (t < 1.0)
    coeffs = _smoothstep_coeffs(order)
    powers = order + 1 + np.arange(order + 1)
    tt = np.clip(t, 0.0, 1.0)
    # second derivative of the ramp; exponent order-1 is safe: for order 0 the
    # k=0 term has factor (n+k+1)*(n+k) = 0
    val = np.einsum(
        "k,...k->...", coeffs * powers * (powers - 1), tt[..., None] ** np.maximum(powers - 2, 0)
    )
    return np.where(inside, val / (4.0 * sigma * sigma), 0.0)


def smoothing_regularity_bound(profile: SmoothingProfile) -> float:
    """Single constant bounding |phi|, |phi'| and their Lipschitz moduli.

    Infinite when the profile is not C^1-Lipschitz (Dirac; smoothstep of
    order < 2, whose bump derivative jumps at the support edges).
    """
    if profile.kind == "gaussian":
        v = profile.sigma / 2.0
        peak = 1.0 / math.sqrt(2.0 * math.pi * v)
        sup_d1 = peak * math.exp(-0.5) / math.sqrt(v)
        sup_d2 = peak / v
        return max(peak, sup_d1, sup_d2)
    if profile.kind == "smoothstep" and profile.order >= 2:
        grid = np.linspace(-profile.sigma, profile.sigma, 4097)
        bump = smoothstep_bump(profile.order, profile.sigma, grid)
        d1 = _smoothstep_bump_deriv(profile.order, profile.sigma, grid)
        d2 = np.max(np.abs(np.gradient(d1, grid)))
        return float(max(np.max(np.abs(bump)), np.max(np.abs(d1)), d2))
    return math.inf


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class OperatorSpec:
    """Positive linear operator applied to smoothed slices.

    kind "identity" or "cumulative" (running integral on [-T, T]).
    half_width is T; None selects the data-driven default
    T = max |slice value| + sigma + 1, recomputed per slice set.
    norm_bound overrides the operator-norm estimate (1 for identity,
    sqrt(2) * T for the cumulative integral on a 2T window).
    """

    kind: str  # "identity" | "cumulative"
    half_width: float | None = None
    norm_bound: float | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "cumulative"):
            raise InvalidArgumentError(f"unknown operator kind: {self.kind!r}")
        if self.half_width is not None and not self.half_width > 0:
            raise InvalidArgumentError("operator half_width must be positive")

    @classmethod
    def identity(cls) -> "OperatorSpec":
        return cls("identity")

    @classmethod
    def cumulative(cls, half_width: float | None = None) -> "OperatorSpec":
        return cls("cumulative", half_width=half_width)

    def operator_norm(self, half_width: float | None = None) -> float:
        if self.norm_bound is not None:
            return self.norm_bound
        if self.kind == "identity":
            return 1.0
        T = half_width if half_width is not None else self.half_width
        if T is None:
            raise InvalidArgumentError(
                "cumulative operator norm needs a resolved half-width"
            )
        return math.sqrt(2.0) * T


# ---------------------------------------------------------------------------
# kernel specification and mode dispatch


@dataclass(frozen=True)
class KernelSpec:
    """Composite kernel: smoothing profile, operator, and a slice family."""

    smoothing: SmoothingProfile
    operator: OperatorSpec
    family: SliceFamily
    slice_count: int = 10
    seed: int = 0
    resample_per_call: bool = False
    quadrature_points: int = 2048

    def __post_init__(self):
        if self.slice_count < 1:
            raise InvalidArgumentError("slice_count must be >= 1")
        if self.quadrature_points < 8:
            raise InvalidArgumentError("quadrature_points must be >= 8")
        evaluation_mode(self)  # reject unusable pairs eagerly

    def make_slices(self, seed=None) -> SliceSet:
        from .slicing import sample_slices

        return sample_slices(self.family, self.slice_count, self.seed if seed is None else seed)


MODE_GAUSS_ID = "closed:gaussian-identity"
MODE_DIRAC_CUM = "closed:dirac-cumulative"
MODE_SS0_CUM = "closed:smoothstep0-cumulative"
MODE_QUADRATURE = "quadrature"

_MODE_KIND = {
    MODE_GAUSS_ID: _accel.KIND_GAUSS_ID,
    MODE_DIRAC_CUM: _accel.KIND_DIRAC_CUM,
    MODE_SS0_CUM: _accel.KIND_SMOOTHSTEP0_CUM,
}


def evaluation_mode(spec: KernelSpec) -> str:
    """Closed-form tag or "quadrature"; raises for unusable pairs."""
    sm, op = spec.smoothing, spec.operator
    if op.kind == "identity":
        if sm.kind == "gaussian":
            return MODE_GAUSS_ID
        if sm.kind == "dirac":
            raise UnsupportedConfigError(
                "identity operator with a Dirac profile has no square-integrable "
                "slice kernel"
            )
        return MODE_QUADRATURE
    if sm.kind == "dirac":
        return MODE_DIRAC_CUM
    if sm.kind == "smoothstep" and sm.order == 0:
        return MODE_SS0_CUM
    return MODE_QUADRATURE


def _range_sigma(smoothing: SmoothingProfile) -> float:
    return smoothing.sigma if smoothing.kind in ("gaussian", "smoothstep") else 0.0


def resolve_half_width(spec: KernelSpec, *value_arrays, half_width=None) -> float | None:
    """Resolve the domain half-width T for the given slice values.

    Closed-form identity kernels need no domain and get None.  An explicit
    half-width is validated against the range condition |f| <= T - sigma
    (the profile must saturate inside the window); the data-driven default
    is max |f| + sigma + 1 over every value seen.
    """
    mode = evaluation_mode(spec)
    if mode == MODE_GAUSS_ID:
        return None
    sigma = _range_sigma(spec.smoothing)
    T = half_width if half_width is not None else spec.operator.half_width
    fmax = max(float(np.max(np.abs(v))) if np.asarray(v).size else 0.0 for v in value_arrays)
    if T is not None:
        if fmax > T - sigma:
            raise SliceRangeError(
                f"slice value with |f| = {fmax:.6g} exceeds the cumulative domain "
                f"bound T - sigma = {T - sigma:.6g}"
            )
        return float(T)
    return fmax + sigma + 1.0


def _operator_profile(spec: KernelSpec):
    """(profile, derivative) callables u -> P(u) after the operator.

    derivative is None when d/du P is not representable on a grid.
    """
    sm, op = spec.smoothing, spec.operator
    if op.kind == "identity":
        if sm.kind == "gaussian":
            v = sm.sigma / 2.0

            def prof(u):
                return np.exp(-u * u / (2.0 * v)) / math.sqrt(2.0 * math.pi * v)

            def dprof(u):
                return -(u / v) * prof(u)

            return prof, dprof
        if sm.kind == "smoothstep":
            prof = lambda u: smoothstep_bump(sm.order, sm.sigma, u)
            if sm.order >= 1:
                return prof, lambda u: _smoothstep_bump_deriv(sm.order, sm.sigma, u)
            return prof, None
        raise UnsupportedConfigError("identity + dirac has no profile")
    # cumulative operator
    if sm.kind == "gaussian":
        v = sm.sigma / 2.0

        def prof(u):
            return 0.5 * (1.0 + erf(u / math.sqrt(2.0 * v)))

        def dprof(u):
            return np.exp(-u * u / (2.0 * v)) / math.sqrt(2.0 * math.pi * v)

        return prof, dprof
    if sm.kind == "dirac":
        return lambda u: (np.asarray(u) >= 0.0).astype(np.float64), None
    return (
        lambda u: smoothstep(sm.order, sm.sigma, u),
        lambda u: smoothstep_bump(sm.order, sm.sigma, u),
    )


def _trapezoid_grid(T: float, n: int):
    grid = np.linspace(-T, T, n)
    w = np.full(n, grid[1] - grid[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return grid, w


def _as_value_matrix(x, slices: SliceSet) -> np.ndarray:
    vals = slice_values(x, slices)
    return np.ascontiguousarray(np.atleast_2d(vals), dtype=np.float64)


# ---------------------------------------------------------------------------
# kernel evaluation


def k_theta(x, y, f, spec: KernelSpec, half_width: float | None = None) -> float:
    """Single-slice kernel value for one pair of points."""
    from .slicing import eval_defining_function

    fx = eval_defining_function(f, x)
    fy = eval_defining_function(f, y)
    mode = evaluation_mode(spec)
    T = resolve_half_width(spec, [fx, fy], half_width=half_width)
    if mode in _MODE_KIND:
        FA = np.array([[fx]])
        FB = np.array([[fy]])
        return float(
            _accel.pair_kernel_mean(FA, FB, _MODE_KIND[mode], spec.smoothing.sigma, T or 0.0)[0, 0]
        )
    prof, _ = _operator_profile(spec)
    grid, w = _trapezoid_grid(T, spec.quadrature_points)
    return float(np.sum(w * prof(grid - fx) * prof(grid - fy)))


def pairwise_matrix(A, B, spec, slices: SliceSet | None = None, half_width=None) -> np.ndarray:
    """Kernel matrix k(a_i, b_j) between two point sets.

    Accepts a KernelSpec (with its SliceSet) or an RbfKernel baseline.
    One half-width is resolved across both point sets so the matrix is
    exactly symmetric for A is B.
    """
    if isinstance(spec, RbfKernel):
        return rbf_matrix(np.atleast_2d(A), np.atleast_2d(B), spec.sigma)
    if slices is None:
        raise InvalidArgumentError("sliced kernels need an explicit SliceSet")
    FA = _as_value_matrix(A, slices)
    FB = _as_value_matrix(B, slices)
    mode = evaluation_mode(spec)
    T = resolve_half_width(spec, FA, FB, half_width=half_width)
    if mode in _MODE_KIND:
        return _accel.pair_kernel_mean(FA, FB, _MODE_KIND[mode], spec.smoothing.sigma, T or 0.0)
    prof, _ = _operator_profile(spec)
    grid, w = _trapezoid_grid(T, spec.quadrature_points)
    K = np.zeros((FA.shape[0], FB.shape[0]))
    for l in range(FA.shape[1]):
        P = prof(grid[:, None] - FA[None, :, l])  # (G, n)
        Q = prof(grid[:, None] - FB[None, :, l])
        K += P.T @ (Q * w[:, None])
    return K / FA.shape[1]


def kernel(x, y, spec: KernelSpec, slices: SliceSet, half_width=None) -> float:
    """Slice-averaged kernel k(x, y) = mean_l k_theta under slice l."""
    return float(pairwise_matrix(x, y, spec, slices, half_width=half_width)[0, 0])


def kernel_cw(x, y, sigma: float, d: int | None = None) -> float:
    """Closed-form approximation of the linear-slice Gaussian kernel.

    Valid for d >= 2; accurate only while ||x - y||^2 / sigma stays small
    (the underlying confluent-hypergeometric approximation is first-order).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if d is None:
        d = x.shape[-1]
    if d < 2:
        raise InvalidArgumentError("closed-form slice kernel needs dimension >= 2")
    if not sigma > 0:
        raise InvalidArgumentError("sigma must be positive")
    sq = float(np.sum((x - y) ** 2))
    return 1.0 / math.sqrt(2.0 * math.pi * sigma) * (1.0 + sq / (sigma * (d - 1.5))) ** -0.5


def drift_coefficients(FZ, FW, weights, spec: KernelSpec, half_width: float) -> np.ndarray:
    """Weighted slice-derivative sums sum_s w_s dk/df(FZ[r,l], FW[s,l]).

    Internal building block for kernel gradients and drift fields; FZ and FW
    are slice-value matrices, weights sum over the FW rows.
    """
    mode = evaluation_mode(spec)
    FZ = np.ascontiguousarray(FZ, dtype=np.float64)
    FW = np.ascontiguousarray(FW, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if mode in _MODE_KIND:
        return _accel.pair_dk_weighted(
            FZ, FW, weights, _MODE_KIND[mode], spec.smoothing.sigma, half_width or 0.0
        )
    prof, dprof = _operator_profile(spec)
    if dprof is None:
        raise UnsupportedConfigError(
            "kernel gradient is undefined for this (operator, smoothing) pair: "
            "the profile derivative is not representable"
        )
    grid, w = _trapezoid_grid(half_width, spec.quadrature_points)
    out = np.empty(FZ.shape)
    for l in range(FZ.shape[1]):
        dP = -dprof(grid[:, None] - FZ[None, :, l])  # (G, R)
        Q = prof(grid[:, None] - FW[None, :, l])  # (G, S)
        out[:, l] = dP.T @ (w[:, None] * Q) @ weights
    return out


def kernel_gradient(x, y, spec: KernelSpec, slices: SliceSet, half_width=None) -> np.ndarray:
    """Gradient of kernel(x, y) in its first argument, via the chain rule."""
    fx = _as_value_matrix(x, slices)
    fy = _as_value_matrix(y, slices)
    T = resolve_half_width(spec, fx, fy, half_width=half_width)
    D = drift_coefficients(fx, fy, np.array([1.0]), spec, T)  # (1, L)
    grads = slice_gradients(np.atleast_2d(np.asarray(x, dtype=np.float64)), slices)  # (1, L, d)
    L = len(slices)
    return np.einsum("l,lc->c", D[0], grads[0]) / L


def gram(points, spec: KernelSpec, slices: SliceSet, half_width=None) -> np.ndarray:
    """Symmetric kernel Gram matrix of one point set."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] < 1:
        raise InvalidArgumentError("gram needs at least one point")
    return pairwise_matrix(points, points, spec, slices, half_width=half_width)


# ---------------------------------------------------------------------------
# Gaussian RBF baseline


@dataclass(frozen=True)
class RbfKernel:
    """Baseline kernel exp(-||x - y||^2 / (2 sigma)); not slice-based."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidArgumentError("rbf sigma must be positive")


def rbf_matrix(X, Y, sigma: float) -> np.ndarray:
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    sq = np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :] - 2.0 * X @ Y.T
    return np.exp(-np.maximum(sq, 0.0) / (2.0 * sigma))


def rbf_drift(Z, W, weights, sigma: float) -> np.ndarray:
    """sum_s w_s grad_z k_rbf(w_s, z) for each row z of Z."""
    K = rbf_matrix(Z, W, sigma)  # (R, S)
    wK = K * weights[None, :]
    # grad_z k = k * (w - z) / sigma
    return (wK @ W - wK.sum(axis=1)[:, None] * Z) / sigma
