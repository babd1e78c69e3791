import math

import numpy as np
import pytest
import sympy as sp

from striph import basis as B
from striph import presets as P
from striph.errors import EmptyCorpus, InvalidIndex
from striph.quadrature import TWO_PI
from striph.weights import one_weight, power_weight

_x = sp.symbols("x", real=True)


def _symbolic_spectrum(expr, N):
    """Dual pairings of a sympy expression, exactly."""
    pi2 = sp.pi**2
    a0 = sp.integrate(expr * (2 * sp.pi - _x), (_x, 0, 2 * sp.pi)) / (2 * pi2)
    ac = [sp.integrate(expr * (2 * sp.pi - _x) * sp.cos(n * _x), (_x, 0, 2 * sp.pi)) / pi2 for n in range(1, N + 1)]
    as_ = [sp.integrate(expr * sp.sin(n * _x), (_x, 0, 2 * sp.pi)) / pi2 for n in range(1, N + 1)]
    return float(a0), np.array([float(v) for v in ac]), np.array([float(v) for v in as_])


def test_eval_primal_and_dual():
    assert B.eval_primal(("C", 0), 1.3) == 1.0
    assert B.eval_primal(("S", 1), math.pi / 2) == pytest.approx(math.pi / 2)
    assert B.eval_primal(("C", 2), math.pi) == pytest.approx(1.0)
    assert B.eval_dual(("C", 0), 0.0) == pytest.approx(1 / math.pi)
    assert B.eval_dual(("S", 1), math.pi / 2) == pytest.approx(1 / math.pi**2)
    assert B.eval_dual(("C", 1), TWO_PI) == 0.0
    for fn in (B.eval_primal, B.eval_dual):
        with pytest.raises(InvalidIndex):
            fn(("S", 0), 1.0)
    with pytest.raises(InvalidIndex):
        B.BasisIndex("Q", 1)


def test_gram_identity_n32():
    G = B.biortho_gram(32, 1e-10)
    assert G.shape == (65, 65)
    assert np.max(np.abs(G - np.eye(65))) <= 1e-8
    order = B.basis_order(32)
    assert (order[1].kind, order[2].kind) == ("C", "S")


def test_sin_spectrum_closed_form():
    s = B.biortho_coefficients(P.sinx(), 8)
    assert s.a0c == pytest.approx(1 / math.pi, abs=1e-13)
    assert s.ac[0] == pytest.approx(1 / (2 * math.pi), abs=1e-13)
    assert s.as_[0] == pytest.approx(1 / math.pi, abs=1e-13)
    n = np.arange(2, 9)
    assert np.allclose(s.ac[1:], -2 / (math.pi * (n**2 - 1)), atol=1e-13)
    assert np.allclose(s.as_[1:], 0.0, atol=1e-13)


@pytest.mark.parametrize(
    "name,expr",
    [
        ("poly", _x * (2 * sp.pi - _x) * (sp.pi - _x)),
        ("xsinx", _x * sp.sin(_x)),
        ("bell", (_x * (2 * sp.pi - _x)) ** 2 / sp.pi**3),
    ],
)
def test_spectrum_matches_symbolic(name, expr):
    f = {"poly": P.poly, "xsinx": P.xsinx, "bell": P.bell}[name]()
    a0, ac, as_ = _symbolic_spectrum(expr, 5)
    s = B.biortho_coefficients(f, 5)
    assert s.a0c == pytest.approx(a0, abs=1e-12)
    assert np.allclose(s.ac, ac, atol=1e-12)
    assert np.allclose(s.as_, as_, atol=1e-12)


def test_poly_sine_coefficients():
    # int_0^{2pi} x(2pi-x)(pi-x) sin nx dx = 12 pi / n^3
    s = B.biortho_coefficients(P.poly(), 16)
    n = np.arange(1, 17)
    assert np.allclose(s.as_, 12 / (math.pi * n**3), atol=1e-12)


def test_zero_function():
    s = B.biortho_coefficients(P.zero(), 4)
    assert s.a0c == 0 and not s.ac.any() and not s.as_.any()


def test_dual_via_fourier_cross_check():
    for f in (P.xsinx(), P.sinx(), P.poly()):
        direct = B.biortho_coefficients(f, 10)
        via = B.dual_coefficients_via_fourier(f, 10)
        assert via.a0c == pytest.approx(direct.a0c, abs=1e-12)
        assert np.allclose(via.ac, direct.ac, atol=1e-12)
        assert np.allclose(via.as_, direct.as_, atol=1e-12)
        fs = B.fourier_coefficients(f, 10)
        assert np.allclose(direct.as_, fs.s / math.pi**2, atol=1e-13)


def test_fourier_coefficients_raw():
    fs = B.fourier_coefficients(P.sinx(), 4)
    assert fs.s[0] == pytest.approx(math.pi, abs=1e-13)
    assert np.allclose(fs.c, 0, atol=1e-13) and np.allclose(fs.s[1:], 0, atol=1e-13)
    one = B.fourier_coefficients(lambda x: np.ones_like(x), 3)
    assert one.c[0] == pytest.approx(TWO_PI) and np.allclose(one.c[1:], 0, atol=1e-13)


def test_synthesize_unit_spectrum():
    s = B.biortho_coefficients(P.xsinx(), 6)
    assert B.synthesize(s, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-13)
    zero = B.BiorthoSpectrum(0.0, np.zeros(3), np.zeros(3))
    assert B.synthesize(zero, 1.0) == 0.0


def test_synthesis_error_decays_like_one_over_n():
    f = P.sinx()
    x = np.linspace(0, TWO_PI, 257)
    err = {N: np.max(np.abs(B.synthesize(B.biortho_coefficients(f, N), x) - f(x))) for N in (16, 32, 64)}
    for N, e in err.items():
        assert e <= 4.0 / N
    assert err[64] < err[32] < err[16]


def test_projector_reproduces_primal_element():
    g = B.projector_snm(P.xsinx(), 0, 1)
    x = np.linspace(0, TWO_PI, 11)
    assert np.allclose(g(x), x * np.sin(x), atol=1e-13)
    g3 = B.projector_snm(P.xsinx(), 3, 1)
    assert np.allclose(g3(x), x * np.sin(x), atol=1e-13)
    with pytest.raises(ValueError):
        B.projector_snm(P.xsinx(), 2, 0)


def test_projector_idempotent():
    f = P.poly()
    once = B.projector_snm(f, 5, 4)
    twice = B.projector_snm(once, 5, 4)
    x = np.linspace(0, TWO_PI, 41)
    assert np.allclose(once(x), twice(x), atol=1e-10)


def test_projector_carries_derivatives():
    g = B.projector_snm(P.xsinx(), 2, 2)
    x = np.linspace(0.1, 6, 7)
    assert np.allclose(g.derivative(x), np.sin(x) + x * np.cos(x), atol=1e-12)
    assert np.allclose(g.derivative(x, 2), 2 * np.cos(x) - x * np.sin(x), atol=1e-12)


def test_projector_norm_scan():
    assert B.projector_norm_scan([P.xsinx()], one_weight(), 2.0, [(0, 1), (4, 4)]) == pytest.approx([1.0, 1.0])
    with pytest.raises(EmptyCorpus):
        B.projector_norm_scan([], one_weight(), 2.0, [(1, 1)])
    vals = B.projector_norm_scan(P.smooth_corpus(), power_weight(0.5), 2.0, [(4, 4), (16, 16), (32, 32)])
    assert all(np.isfinite(vals)) and max(vals) < 5.0


def test_young_hausdorff_sin():
    lhs, rhs = B.young_hausdorff_ratio(P.sinx(), 2.0, 8)
    assert lhs == pytest.approx(math.pi, abs=1e-12)
    assert rhs == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    lhs0, rhs0 = B.young_hausdorff_ratio(P.zero(), 2.0, 4)
    assert lhs0 == 0 and rhs0 == 0 and B.safe_ratio(lhs0, rhs0) is None
    with pytest.raises(ValueError):
        B.young_hausdorff_ratio(P.sinx(), 2.5, 4)


def test_young_hausdorff_converse_finite():
    for f in P.band_limited_corpus():
        a, b = B.young_hausdorff_converse(f, 1.5, 12)
        assert np.isfinite(a) and b > 0


def test_parseval_band_limited():
    for f in P.band_limited_corpus():
        assert B.parseval_defect(f, 16) <= 1e-8


def test_coeff_decay_bound():
    assert B.coeff_decay_bound(B.biortho_coefficients(P.xsinx(), 8), floor=1e-13) == pytest.approx(1.0, abs=1e-12)
    assert B.coeff_decay_bound(B.BiorthoSpectrum(0.0, np.zeros(4), np.zeros(4))) == 0.0
    c = B.coeff_decay_bound(B.biortho_coefficients(P.sinx(), 64))
    # n = 2 dominates: 4 * 2 / (3 pi)
    assert c == pytest.approx(8 / (3 * math.pi), rel=1e-10)


def test_spectrum_json_roundtrip():
    s = B.biortho_coefficients(P.poly(), 5)
    d = s.to_dict()
    assert set(d) == {"N", "a0c", "ac", "as", "source"}
    back = B.BiorthoSpectrum.from_dict(d)
    assert back.a0c == s.a0c and np.array_equal(back.ac, s.ac) and np.array_equal(back.as_, s.as_)
    d["N"] = 7
    with pytest.raises(ValueError):
        B.BiorthoSpectrum.from_dict(d)
    with pytest.raises(ValueError):
        B.BiorthoSpectrum(math.nan, np.zeros(1), np.zeros(1))
