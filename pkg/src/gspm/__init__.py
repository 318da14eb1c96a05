"""Sliced probability metrics, their slice kernels, and particle flows.

The package slices d-dimensional sample clouds through families of scalar
functions (linear projections, odd-degree homogeneous polynomials, circular
distances), compares the 1D slices with a base metric, and exposes the
equivalent kernel view: the weighted-L2 slice distance is an MMD whose
kernel averages 1D profile inner products over slices.  On top of the
kernels sits a noisy Euler particle flow for matching a source cloud to a
target, with the regularity constants of its convergence bound.

Hot pairwise loops run through numba when available; set GSPM_BACKEND=numpy
to force the pure-numpy fallback (see gspm._accel).
"""

from ._accel import backend_name
from .datasets import generate, load_csv, save_csv
from .evaluation import wasserstein2_exact
from .flow import (
    ConvergenceBound,
    FlowConfig,
    FlowState,
    TheoremConstants,
    convergence_bound,
    drift,
    drift_field,
    flow_step,
    noise_schedule,
    run_flow,
    theorem_constants,
)
from .kernels import (
    KernelSpec,
    OperatorSpec,
    RbfKernel,
    SmoothingProfile,
    evaluation_mode,
    gram,
    k_theta,
    kernel,
    kernel_cw,
    kernel_gradient,
    pairwise_matrix,
    resolve_half_width,
    smoothing_regularity_bound,
    smoothstep,
)
from .metrics import (
    BaseMetricSpec,
    EmpiricalDistribution,
    base_metric_1d,
    cramer2_1d,
    cramer_1d,
    gspm,
    max_gspm,
    mmd2,
    slice_empirical,
    wasserstein_1d,
)
from .slicing import (
    DefiningFunction,
    SliceFamily,
    SliceSet,
    enumerate_multi_indices,
    estimate_regularity_bounds,
    eval_defining_function,
    grad_defining_function,
    sample_directions,
    sample_slices,
    slice_gradients,
    slice_values,
)

__version__ = "0.1.0"
