"""Backend dispatch for the pairwise slice-kernel hot loops.

Two interchangeable implementations ship:

* ``numba_impl`` — ``@njit`` kernels, parallel over independent output
  entries (per-entry slice sums stay sequential, so results do not depend
  on the thread count).
* ``numpy_impl`` — pure-numpy broadcasting fallback.

Selection is controlled by the ``GSPM_BACKEND`` environment variable:
``auto`` (default, numba when importable), ``numba`` (require it), or
``numpy`` (force the fallback).  ``benchmarks/bench_backends.py`` compares
the two on the workloads that matter.
"""

import os

from . import numpy_impl

KIND_GAUSS_ID = 0
KIND_DIRAC_CUM = 1
KIND_SMOOTHSTEP0_CUM = 2

_requested = os.environ.get("GSPM_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"GSPM_BACKEND must be 'auto', 'numba' or 'numpy', got {_requested!r}"
    )

backend_name = "numpy"
_impl = numpy_impl
if _requested in ("auto", "numba"):
    try:
        from . import numba_impl as _numba_impl
    except ImportError:
        if _requested == "numba":
            raise
    else:
        _impl = _numba_impl
        backend_name = "numba"

pair_kernel_mean = _impl.pair_kernel_mean
pair_dk_weighted = _impl.pair_dk_weighted


def set_thread_cap(n: int) -> None:
    """Cap worker threads for the parallel backend (no-op for numpy)."""
    if n < 1:
        raise ValueError("thread cap must be >= 1")
    if backend_name == "numba":
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
