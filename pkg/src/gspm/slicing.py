"""Scalar slicers (defining functions), their gradients, and slice sampling.

A slicer maps a d-dimensional point to a scalar.  Three families are
supported:

* ``linear``:    f(x) = <x, theta>, theta on the unit sphere in R^d.
* ``poly``:      f(x) = sum_{|alpha|=m} theta_alpha x^alpha, odd degree m,
  theta on the unit sphere in coefficient space.
* ``circular``:  f(x) = ||x - s*theta||, radius scale s > 0, theta on the
  unit sphere in R^d.

Linear and polynomial slicers are homogeneous of degree one in theta, which
keeps the hypersurface parameterization unique; odd polynomial degree keeps
the induced transform injective.  The circular slicer has a gradient
singularity at its center x = s*theta, which is raised as an error rather
than silently zeroed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError, SingularGradientError

__all__ = [
    "SliceFamily",
    "DefiningFunction",
    "SliceSet",
    "coefficient_dim",
    "enumerate_multi_indices",
    "sample_directions",
    "sample_slices",
    "eval_defining_function",
    "grad_defining_function",
    "slice_values",
    "slice_gradients",
    "estimate_regularity_bounds",
]


@dataclass(frozen=True)
class SliceFamily:
    """Descriptor of a slicer family: kind, ambient dimension, parameters."""

    kind: str  # "linear" | "poly" | "circular"
    dim: int
    degree: int = 1  # polynomial degree m (odd), ignored otherwise
    radius: float = 1.0  # circular radius scale s, ignored otherwise

    def __post_init__(self):
        if self.kind not in ("linear", "poly", "circular"):
            raise InvalidArgumentError(f"unknown slice family kind: {self.kind!r}")
        if self.dim < 1:
            raise InvalidArgumentError("slice family dimension must be >= 1")
        if self.kind == "poly":
            if self.degree < 1 or self.degree % 2 == 0:
                raise InvalidArgumentError(
                    f"polynomial slicer degree must be odd and positive, got {self.degree}"
                )
        if self.kind == "circular" and not self.radius > 0:
            raise InvalidArgumentError("circular slicer requires radius > 0")


def coefficient_dim(family: SliceFamily) -> int:
    """Dimension of the parameter (coefficient) sphere for a family."""
    if family.kind == "poly":
        return math.comb(family.dim + family.degree - 1, family.degree)
    return family.dim


def enumerate_multi_indices(d: int, m: int) -> np.ndarray:
    """All multi-indices alpha >= 0 with |alpha| = m, graded-lexicographic.

    Returns an (n, d) int array with n = C(d+m-1, m).  Within the fixed
    degree the order is descending lexicographic, so for m = 1 row i is the
    i-th standard basis vector and the polynomial slicer recovers <x, theta>
    with coefficients aligned to coordinates.
    """
    if d < 1 or m < 1:
        raise InvalidArgumentError("multi-index enumeration needs d >= 1 and m >= 1")
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for a in range(remaining, -1, -1):
            rec(prefix + [a], remaining - a, slots - 1)

    rec([], m, d)
    alphas = np.array(out, dtype=np.int64)
    assert alphas.shape == (math.comb(d + m - 1, m), d)
    return alphas


def sample_directions(d_coeff: int, L: int, seed: int) -> np.ndarray:
    """L uniform draws from the unit sphere S^(d_coeff-1), as (L, d_coeff) rows.

    Gaussian vectors normalized to unit length; deterministic given seed.
    """
    if d_coeff < 1:
        raise InvalidArgumentError("d_coeff must be >= 1")
    if L < 1:
        raise InvalidArgumentError("L must be >= 1")
    rng = np.random.default_rng(seed)
    thetas = rng.standard_normal((L, d_coeff))
    norms = np.linalg.norm(thetas, axis=1)
    while np.any(norms == 0.0):  # zero draw has probability 0 but stay safe
        bad = norms == 0.0
        thetas[bad] = rng.standard_normal((int(bad.sum()), d_coeff))
        norms = np.linalg.norm(thetas, axis=1)
    return thetas / norms[:, None]


@dataclass(frozen=True)
class DefiningFunction:
    """One slicer: a family descriptor plus a unit coefficient vector."""

    family: SliceFamily
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", theta)
        if theta.shape != (coefficient_dim(self.family),):
            raise InvalidArgumentError(
                f"theta has shape {theta.shape}, expected ({coefficient_dim(self.family)},)"
            )


@dataclass(frozen=True)
class SliceSet:
    """A reproducible batch of L slicers sharing one family.

    Regenerating with the same (family, L, seed) gives bitwise-identical
    parameters; metric and kernel evaluations that share a SliceSet are
    exactly symmetric.
    """

    family: SliceFamily
    thetas: np.ndarray  # (L, n_theta)
    seed: int
    alphas: np.ndarray = field(default=None, repr=False)  # (n_theta, d) for poly

    def __post_init__(self):
        if self.family.kind == "poly" and self.alphas is None:
            object.__setattr__(
                self, "alphas", enumerate_multi_indices(self.family.dim, self.family.degree)
            )

    def __len__(self) -> int:
        return self.thetas.shape[0]

    def functions(self) -> list[DefiningFunction]:
        return [DefiningFunction(self.family, t) for t in self.thetas]


def sample_slices(family: SliceFamily, L: int, seed: int) -> SliceSet:
    """Sample L slicers with uniform sphere directions in coefficient space."""
    thetas = sample_directions(coefficient_dim(family), L, seed)
    return SliceSet(family=family, thetas=thetas, seed=seed)


def _check_points(X, dim):
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionMismatchError(
            f"points have shape {np.asarray(X).shape}, expected (*, {dim})"
        )
    return X, single


def _monomials(X: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """(N, K) matrix of x^alpha for each point and multi-index."""
    # X: (N, d), alphas: (K, d) -> prod over d of X[:, c] ** alphas[:, c]
    return np.prod(X[:, None, :] ** alphas[None, :, :], axis=2)


def _monomial_grads(X: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """(N, K, d) tensor of d/dx_c x^alpha.  Safe at x = 0."""
    N, d = X.shape
    K = alphas.shape[0]
    out = np.zeros((N, K, d))
    for c in range(d):
        factor = alphas[:, c].astype(np.float64)  # (K,)
        if not np.any(factor):
            continue
        reduced = alphas.copy()
        reduced[:, c] = np.maximum(reduced[:, c] - 1, 0)  # clip keeps 0**0 = 1
        out[:, :, c] = factor[None, :] * _monomials(X, reduced)
    return out


def slice_values(X: np.ndarray, slices: SliceSet) -> np.ndarray:
    """Evaluate every slicer at every point: (N, L) matrix of f_l(x_i)."""
    X, single = _check_points(X, slices.family.dim)
    fam = slices.family
    if fam.kind == "linear":
        vals = X @ slices.thetas.T
    elif fam.kind == "poly":
        vals = _monomials(X, slices.alphas) @ slices.thetas.T
    else:  # circular
        diff = X[:, None, :] - fam.radius * slices.thetas[None, :, :]
        vals = np.linalg.norm(diff, axis=2)
    return vals[0] if single else vals


def slice_gradients(X: np.ndarray, slices: SliceSet) -> np.ndarray:
    """Gradients of every slicer at every point: (N, L, d) tensor."""
    X, single = _check_points(X, slices.family.dim)
    fam = slices.family
    N = X.shape[0]
    L = len(slices)
    if fam.kind == "linear":
        grads = np.broadcast_to(slices.thetas[None, :, :], (N, L, fam.dim)).copy()
    elif fam.kind == "poly":
        mg = _monomial_grads(X, slices.alphas)  # (N, K, d)
        grads = np.einsum("nkc,lk->nlc", mg, slices.thetas)
    else:  # circular
        diff = X[:, None, :] - fam.radius * slices.thetas[None, :, :]
        norms = np.linalg.norm(diff, axis=2)
        if np.any(norms == 0.0):
            raise SingularGradientError(
                "circular slicer gradient is undefined at its center x = s*theta"
            )
        grads = diff / norms[:, :, None]
    return grads[0] if single else grads


def _as_singleton_set(f: DefiningFunction) -> SliceSet:
    return SliceSet(family=f.family, thetas=f.theta[None, :], seed=-1)


def eval_defining_function(f: DefiningFunction, x) -> float:
    """f(x) for a single slicer and a single point."""
    vals = slice_values(x, _as_singleton_set(f))
    return float(vals[0])


def grad_defining_function(f: DefiningFunction, x) -> np.ndarray:
    """Analytic gradient of f at x; raises at the circular center."""
    grads = slice_gradients(x, _as_singleton_set(f))
    return grads[0]


def estimate_regularity_bounds(
    family: SliceFamily,
    box: tuple,
    grid: int = 11,
    n_directions: int = 16,
    seed: int = 0,
) -> float:
    """Empirical bound G_f: max gradient norm and gradient-Lipschitz quotient.

    Evaluates sampled slicers on a regular grid over the axis-aligned box
    and returns the larger of max ||grad f(x)|| and the max finite-difference
    Lipschitz quotient ||grad f(x) - grad f(y)|| / ||x - y|| over grid pairs.
    This is a lower estimate of the true supremum: refining the grid can only
    raise it.
    """
    lo = np.asarray(box[0], dtype=np.float64)
    hi = np.asarray(box[1], dtype=np.float64)
    if lo.shape != (family.dim,) or hi.shape != (family.dim,):
        raise InvalidArgumentError("box bounds must match the family dimension")
    if np.any(hi <= lo):
        raise InvalidArgumentError("degenerate box: need hi > lo on every axis")
    if grid < 2:
        raise InvalidArgumentError("grid resolution must be >= 2 per axis")

    axes = [np.linspace(lo[c], hi[c], grid) for c in range(family.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)  # (G, d)

    slices = sample_slices(family, n_directions, seed)
    grads = slice_gradients(pts, slices)  # (G, L, d)
    g_sup = float(np.linalg.norm(grads, axis=2).max())

    dx = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)  # (G, G)
    np.fill_diagonal(dx, np.inf)
    lip = 0.0
    for l in range(len(slices)):
        dg = np.linalg.norm(grads[:, l, None, :] - grads[None, :, l, :], axis=2)
        lip = max(lip, float((dg / dx).max()))
    return max(g_sup, lip)
