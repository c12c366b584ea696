import numpy as np
import pytest

from dirac_lr import _kernels

rng = np.random.default_rng(3)


@pytest.fixture(params=["1", "0"], ids=["numba", "numpy"])
def backend(request, monkeypatch):
    monkeypatch.setenv("DIRAC_LR_NUMBA", request.param)
    return request.param


def test_flag(backend):
    assert _kernels.numba_enabled() == (backend == "1" and _kernels._HAVE_NUMBA)


def test_hermite_parity(backend):
    xi = np.linspace(-7, 7, 501)
    got = _kernels.hermite_functions(25, 1.3, xi)
    assert got.shape == (26, 501)
    assert np.allclose(got, _kernels.hermite_functions_numpy(25, 1.3, xi), rtol=1e-13, atol=1e-15)


def test_central4_parity(backend):
    f = rng.normal(size=300) + 1j * rng.normal(size=300)
    assert np.allclose(_kernels.central4(f, 0.1), _kernels.central4_numpy(f, 0.1),
                       rtol=1e-13, atol=1e-13)


def test_central4_exact_on_cubics(backend):
    x = np.linspace(-1, 1, 41)
    f = (2 * x ** 3 - x + 0.5).astype(complex)
    assert np.max(np.abs(_kernels.central4(f, x[1] - x[0]) - (6 * x ** 2 - 1))) < 1e-11


def test_dirac_combine_parity(backend):
    arrs = [rng.normal(size=64) + 1j * rng.normal(size=64) for _ in range(4)]
    v = rng.normal(size=64)
    got = _kernels.dirac_combine(*arrs, 0.3, -0.2, 1.1, v)
    ref = _kernels.dirac_combine_numpy(*arrs, 0.3, -0.2, 1.1, v)
    for a, b in zip(got, ref):
        assert np.allclose(a, b, rtol=1e-14, atol=1e-14)


def test_spinor_inner_parity(backend):
    u1, l1, u2, l2 = (rng.normal(size=100) + 1j * rng.normal(size=100) for _ in range(4))
    got = _kernels.spinor_inner(u1, l1, u2, l2, 0.05)
    ref = _kernels.spinor_inner_numpy(u1, l1, u2, l2, 0.05)
    assert abs(got - ref) < 1e-12 * abs(ref)


def test_spinor_inner_trapezoid():
    ones = np.ones(11, dtype=complex)
    zeros = np.zeros(11, dtype=complex)
    # trapezoid of 1 over 10 intervals of width 0.1
    assert _kernels.spinor_inner_numpy(ones, zeros, ones, zeros, 0.1) == pytest.approx(1.0)
