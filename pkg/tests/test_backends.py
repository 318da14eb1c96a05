import numpy as np
import pytest

from gspm._accel import numpy_impl

numba_impl = pytest.importorskip("gspm._accel.numba_impl")

KINDS = [(0, 0.3, 0.0), (1, 0.0, 5.0), (2, 0.25, 5.0)]


@pytest.fixture(scope="module")
def slice_values():
    rng = np.random.default_rng(0)
    FA = np.ascontiguousarray(rng.standard_normal((17, 9)))
    FB = np.ascontiguousarray(rng.standard_normal((13, 9)))
    FB[0] = FA[0]  # exact ties exercise the subgradient branches
    w = rng.random(13)
    w /= w.sum()
    return FA, FB, w


@pytest.mark.parametrize("kind,sigma,T", KINDS)
def test_pair_kernel_mean_backends_agree(slice_values, kind, sigma, T):
    FA, FB, _ = slice_values
    a = numpy_impl.pair_kernel_mean(FA, FB, kind, sigma, T)
    b = numba_impl.pair_kernel_mean(FA, FB, kind, sigma, T)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("kind,sigma,T", KINDS)
def test_pair_dk_weighted_backends_agree(slice_values, kind, sigma, T):
    FA, FB, w = slice_values
    a = numpy_impl.pair_dk_weighted(FA, FB, w, kind, sigma, T)
    b = numba_impl.pair_dk_weighted(FA, FB, w, kind, sigma, T)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-14)


def test_thread_cap_accepts_positive(monkeypatch):
    from gspm import _accel

    _accel.set_thread_cap(1)
    _accel.set_thread_cap(4)
    with pytest.raises(ValueError):
        _accel.set_thread_cap(0)
