"""Particle gradient flow driven by slice-kernel MMD descent.

Each iteration moves every particle along the kernel witness gradient

    v(z) = grad_z [ mean_j k(y_j, z) - mean_i k(x_i, z) ],

the descent field for half the squared kernel discrepancy, with the drift
evaluated at a Gaussian-perturbed point (noise level beta_n) while the
source density stays the pre-noise particle cloud.  Noise widens the
region each particle feels and is decayed over iterations; beta = 0
recovers the plain Euler update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FlowDivergenceError, InvalidArgumentError, NumericalError
from .evaluation import MAX_EXACT_SIZE, wasserstein2_exact
from .kernels import KernelSpec, RbfKernel, drift_coefficients, rbf_drift, resolve_half_width
from .metrics import EmpiricalDistribution, mmd2
from .slicing import SliceSet, slice_gradients, slice_values

__all__ = [
    "FlowConfig",
    "FlowState",
    "TheoremConstants",
    "ConvergenceBound",
    "noise_schedule",
    "drift",
    "drift_field",
    "flow_step",
    "run_flow",
    "theorem_constants",
    "convergence_bound",
]

SCHEDULES = ("constant", "inverse_k")


@dataclass(frozen=True)
class FlowConfig:
    """Step size, noise schedule, iteration budget, kernel, slice policy."""

    kernel: KernelSpec | RbfKernel
    eta: float = 0.05
    iterations: int = 1000
    beta0: float = 0.0
    schedule: str = "constant"
    resample_slices: bool = None  # None: inherit kernel.resample_per_call
    seed: int = 0
    eval_every: int = 10
    log_every: int = 1

    def __post_init__(self):
        if not self.eta >= 0:
            raise InvalidArgumentError("step size eta must be >= 0")
        if self.iterations < 1:
            raise InvalidArgumentError("iterations must be >= 1")
        if self.beta0 < 0:
            raise InvalidArgumentError("beta0 must be >= 0")
        if self.schedule not in SCHEDULES:
            raise InvalidArgumentError(f"schedule must be one of {SCHEDULES}")
        if self.eval_every < 1:
            raise InvalidArgumentError("eval_every must be >= 1")
        if self.log_every < 1:
            raise InvalidArgumentError("log_every must be >= 1")

    @property
    def resamples(self) -> bool:
        if self.resample_slices is None:
            return isinstance(self.kernel, KernelSpec) and self.kernel.resample_per_call
        return bool(self.resample_slices)


@dataclass
class FlowState:
    """Evolving particle cloud plus iteration counter, RNG, and log rows."""

    particles: np.ndarray
    iteration: int
    rng: np.random.Generator
    log: list = field(default_factory=list)

    @classmethod
    def initialize(cls, init: EmpiricalDistribution, config: FlowConfig) -> "FlowState":
        return cls(
            particles=init.samples.copy(),
            iteration=0,
            rng=np.random.default_rng(config.seed),
        )


def noise_schedule(beta0: float, schedule: str, n: int) -> float:
    """Noise level at iteration n: constant beta0, or beta0 / (n + 1)."""
    if n < 0:
        raise InvalidArgumentError("iteration index must be >= 0")
    if schedule == "constant":
        return beta0
    if schedule == "inverse_k":
        return beta0 / (n + 1)
    raise InvalidArgumentError(f"schedule must be one of {SCHEDULES}")


def _slices_for_iteration(config: FlowConfig, n: int) -> SliceSet | None:
    if not isinstance(config.kernel, KernelSpec):
        return None
    if config.resamples:
        return config.kernel.make_slices(seed=np.random.SeedSequence([config.seed, n]))
    return config.kernel.make_slices()


def drift_field(
    Z,
    source: EmpiricalDistribution,
    target: EmpiricalDistribution,
    spec,
    slices: SliceSet = None,
    half_width: float | None = None,
) -> np.ndarray:
    """Descent field rows v(z) for each evaluation point z in Z."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if isinstance(spec, RbfKernel):
        v = rbf_drift(Z, target.samples, target.weights, spec.sigma) - rbf_drift(
            Z, source.samples, source.weights, spec.sigma
        )
    else:
        if slices is None:
            raise InvalidArgumentError("sliced kernels need an explicit SliceSet")
        FZ = slice_values(Z, slices)
        FX = slice_values(source.samples, slices)
        FY = slice_values(target.samples, slices)
        T = resolve_half_width(spec, FZ, FX, FY, half_width=half_width)
        dk_target = drift_coefficients(FZ, FY, target.weights, spec, T)
        dk_source = drift_coefficients(FZ, FX, source.weights, spec, T)
        A = (dk_target - dk_source) / len(slices)
        grads = slice_gradients(Z, slices)
        v = np.einsum("rl,rlc->rc", A, grads)
    if not np.all(np.isfinite(v)):
        raise NumericalError("drift field produced non-finite components")
    return v


def drift(
    x,
    source: EmpiricalDistribution,
    target: EmpiricalDistribution,
    spec,
    slices: SliceSet = None,
    half_width: float | None = None,
) -> np.ndarray:
    """Drift at a single point; see drift_field."""
    return drift_field(x, source, target, spec, slices, half_width=half_width)[0]


def flow_step(state: FlowState, target: EmpiricalDistribution, config: FlowConfig) -> FlowState:
    """Advance every particle one step; mutates and returns the state.

    The drift is evaluated at X + beta_n U with the source density frozen to
    the pre-noise cloud; noise is drawn even when beta_n = 0 so the RNG
    stream (and therefore the trajectory) does not depend on the schedule's
    current value.
    """
    n = state.iteration
    X = state.particles
    beta = noise_schedule(config.beta0, config.schedule, n)
    U = state.rng.standard_normal(X.shape)
    Z = X + beta * U
    source = EmpiricalDistribution(X)
    slices = _slices_for_iteration(config, n)
    v = drift_field(Z, source, target, config.kernel, slices)
    X_next = X + config.eta * v
    # squared coordinates overflow past ~1e154, poisoning every evaluator
    if not np.all(np.isfinite(X_next)) or np.max(np.abs(X_next)) > 1e150:
        raise FlowDivergenceError(
            f"particle coordinates diverged at iteration {n} (eta={config.eta})",
            iteration=n,
            eta=config.eta,
        )
    state.particles = X_next
    state.iteration = n + 1
    return state


def _default_evaluators(target: EmpiricalDistribution, n_particles: int):
    if target.n == n_particles and n_particles <= MAX_EXACT_SIZE:
        return {"w2": lambda P: wasserstein2_exact(P, target.samples)}
    return {}


def run_flow(
    init: EmpiricalDistribution,
    target: EmpiricalDistribution,
    config: FlowConfig,
    evaluators=None,
    on_log=None,
):
    """Run the configured number of steps, logging convergence.

    Log rows land every ``log_every`` iterations (plus first and last) with
    the squared kernel discrepancy against the target, computed with a fixed
    evaluation SliceSet so the curve is comparable even under per-iteration
    slice resampling, and the current noise level.  The expensive evaluators
    (exact W2 by default, when cloud sizes match) run every ``eval_every``
    iterations and at the end.  On divergence the partial log is attached to
    the raised error.

    Returns (final state, log rows).
    """
    state = FlowState.initialize(init, config)
    eval_slices = (
        config.kernel.make_slices() if isinstance(config.kernel, KernelSpec) else None
    )
    if evaluators is None:
        evaluators = _default_evaluators(target, init.n)

    def record(iteration: int):
        if iteration % config.log_every and iteration != config.iterations:
            return
        beta = noise_schedule(config.beta0, config.schedule, iteration)
        current = EmpiricalDistribution(state.particles)
        row = {
            "iter": iteration,
            "mmd2": mmd2(current, target, config.kernel, eval_slices),
            "beta": beta,
        }
        if iteration % config.eval_every == 0 or iteration == config.iterations:
            for name, fn in evaluators.items():
                row[name] = float(fn(state.particles))
        state.log.append(row)
        if on_log is not None:
            on_log(row)

    record(0)
    for n in range(config.iterations):
        try:
            flow_step(state, target, config)
        except FlowDivergenceError as err:
            err.log = state.log
            raise
        record(n + 1)
    return state, state.log


@dataclass(frozen=True)
class TheoremConstants:
    """Smoothness (l_const) and coercivity (lambda_const) of the flow kernel."""

    l_const: float
    lambda_const: float
    g_f: float
    g_phi: float
    op_norm: float
    dim: int


def theorem_constants(g_f: float, g_phi: float, op_norm: float, d: int) -> TheoremConstants:
    """Constants governing the global convergence bound.

    l_const = (g_f^2 + g_f) g_phi^2 op^2,
    lambda_const = sqrt(2 d op^2 g_phi^2 g_f^2 (1 + g_f^2)).
    """
    if g_f <= 0 or g_phi <= 0 or op_norm <= 0 or d < 1:
        raise InvalidArgumentError("all regularity constants must be positive")
    l_const = (g_f**2 + g_f) * g_phi**2 * op_norm**2
    lambda_const = math.sqrt(2.0 * d * op_norm**2 * g_phi**2 * g_f**2 * (1.0 + g_f**2))
    return TheoremConstants(l_const, lambda_const, g_f, g_phi, op_norm, d)


@dataclass(frozen=True)
class ConvergenceBound:
    value: float
    contracting: bool
    sum_beta_sq: float


def convergence_bound(
    zeta0: float, constants: TheoremConstants, eta: float, betas
) -> ConvergenceBound:
    """Decay envelope zeta0 * exp(-2 lambda^2 eta (1 - 3 eta L) sum beta_i^2).

    When eta >= 1/(3 L) the exponent stops contracting; the value is still
    returned with contracting=False so callers can warn.
    """
    if zeta0 < 0:
        raise InvalidArgumentError("zeta0 must be >= 0")
    if eta <= 0:
        raise InvalidArgumentError("eta must be positive")
    betas = np.asarray(betas, dtype=np.float64)
    s = float(np.sum(betas**2))
    lam, L = constants.lambda_const, constants.l_const
    value = zeta0 * math.exp(-2.0 * lam**2 * eta * (1.0 - 3.0 * eta * L) * s)
    return ConvergenceBound(value=value, contracting=eta < 1.0 / (3.0 * L), sum_beta_sq=s)
