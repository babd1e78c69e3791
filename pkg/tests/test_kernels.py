import numpy as np
import pytest

from striph import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")


@pytest.fixture
def spectrum():
    rng = np.random.default_rng(7)
    n = np.arange(1, 41)
    return 0.3, rng.standard_normal(40) / n**2, rng.standard_normal(40) / n**2


@pytest.mark.parametrize("lam", [0.5, 1.0])
def test_series_backends_agree(spectrum, lam):
    a0c, ac, as_ = spectrum
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 2 * np.pi, (30, 20))
    y = rng.uniform(0, 3, (30, 20))
    a = _kernels.series_fields(a0c, ac, as_, lam, x, y, backend="numba")
    b = _kernels.series_fields(a0c, ac, as_, lam, x, y, backend="numpy")
    assert a.shape == (6, 30, 20)
    scale = np.max(np.abs(b), axis=(1, 2), keepdims=True) + 1.0
    assert np.max(np.abs(a - b) / scale) <= 1e-13


def test_series_partial_orders_zero_rows(spectrum):
    a0c, ac, as_ = spectrum
    out = _kernels.series_fields(a0c, ac, as_, 1.0, np.array([1.0]), np.array([0.5]), nderiv=0)
    assert np.all(out[1:] == 0.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_scan_backends_agree(p):
    rng = np.random.default_rng(3)
    cn = rng.uniform(0.1, 2.0, 64)
    cs = rng.uniform(0.1, 2.0, 64)
    h = 2 * np.pi / 64
    a = _kernels.scan_ap(cn, cs, h, p, backend="numba")
    b = _kernels.scan_ap(cn, cs, h, p, backend="numpy")
    assert a == pytest.approx(b, rel=1e-13)
    a = _kernels.scan_rh(cn, cs, h, 0.25, backend="numba")
    b = _kernels.scan_rh(cn, cs, h, 0.25, backend="numpy")
    assert a == pytest.approx(b, rel=1e-13)


def test_scan_constant_cells_is_one():
    cells = np.full(32, 2 * np.pi / 32)
    assert _kernels.scan_ap(cells, cells, 2 * np.pi / 32, 2.0) == pytest.approx(1.0, abs=1e-14)


def test_backend_switch_roundtrip():
    old = _kernels.get_backend()
    try:
        _kernels.set_backend("numpy")
        assert _kernels.get_backend() == "numpy"
        with pytest.raises(ValueError):
            _kernels.set_backend("cuda")
    finally:
        _kernels.set_backend(old)


def test_bitwise_reproducible(spectrum):
    a0c, ac, as_ = spectrum
    x = np.linspace(0, 2 * np.pi, 50)
    y = np.linspace(0, 2, 50)
    for backend in ("numba", "numpy"):
        a = _kernels.series_fields(a0c, ac, as_, 1.0, x, y, backend=backend)
        b = _kernels.series_fields(a0c, ac, as_, 1.0, x, y, backend=backend)
        assert np.array_equal(a, b)
