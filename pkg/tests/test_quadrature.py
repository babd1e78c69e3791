import math

import numpy as np
import pytest
from scipy.special import beta

from striph.errors import BadDimension, MissingDerivative, NonFinite, ToleranceNotReached
from striph.quadrature import (
    TWO_PI,
    Grid1D,
    Interval,
    ScalarFunction1D,
    StripField,
    integrate,
    integrate_many,
    linear_combination,
    make_uniform_grid2d,
)


def test_x_sin_x_over_period():
    assert integrate(lambda x: x * np.sin(x), (0.0, TWO_PI)) == pytest.approx(-TWO_PI, abs=1e-12)


def test_sin_squared():
    assert integrate(lambda x: np.sin(x) ** 2, Interval(0.0, TWO_PI)) == pytest.approx(math.pi, abs=1e-12)


def test_semi_infinite():
    assert integrate(lambda y: np.exp(-y), (0.0, math.inf)) == pytest.approx(1.0, abs=1e-12)


def test_semi_infinite_slow_decay():
    assert integrate(lambda y: 1.0 / (1.0 + y) ** 2, (0.0, math.inf), 1e-12) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("alpha", [-0.5, -0.9, 0.3])
def test_endpoint_power_singularity(alpha):
    # int_0^1 x^alpha (1-x)^2 dx = B(alpha+1, 3)
    val = integrate(lambda x: x**alpha * (1.0 - x) ** 2, (0.0, 1.0), 1e-12, singular_points=(0.0,))
    assert val == pytest.approx(beta(alpha + 1, 3), rel=1e-11)


def test_upper_endpoint_singularity_in_offset_variable():
    # int_0^1 (1-x)^(-1/2) dx written in d = 1 - x
    val = integrate(lambda d: d**-0.5, (0.0, 1.0), 1e-12, singular_points=(0.0,))
    assert val == pytest.approx(2.0, rel=1e-12)


def test_batched_integrand_shape():
    k = np.arange(1, 4)
    vals = integrate(lambda x: np.sin(k[:, None] * x[None, :] if x.ndim == 1 else np.multiply.outer(k, x)) ** 2,
                     (0.0, TWO_PI))
    assert vals.shape == (3,)
    assert np.allclose(vals, math.pi, atol=1e-12)


def test_integrate_many_intervals():
    edges = np.linspace(0.0, math.pi, 9)
    vals = integrate_many(np.sin, list(zip(edges[:-1], edges[1:])))
    assert vals.shape == (8,)
    assert vals.sum() == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(vals, np.cos(edges[:-1]) - np.cos(edges[1:]), atol=1e-13)


def test_full_output():
    res = integrate(np.cos, (0.0, 1.0), full_output=True)
    assert res.converged
    assert res.value == pytest.approx(math.sin(1.0), abs=1e-14)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFinite):
        integrate(lambda x: np.where(x > 0.5, np.nan, x), (0.0, 1.0))


def test_cap_warns():
    with pytest.warns(ToleranceNotReached):
        integrate(lambda x: np.abs(x) ** -0.999, (0.0, 1.0), 1e-12, depth_cap=6, singular_points=(0.0,))


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate(np.sin, (1.0, 0.0))
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)


def test_grid_validation():
    with pytest.raises(BadDimension):
        make_uniform_grid2d(2, 10, 1.0)
    with pytest.raises(ValueError):
        Grid1D(np.array([0.0, 2.0, 1.0]), 1.0)
    g = make_uniform_grid2d(5, 3, 2.0)
    X, Y = g.mesh()
    assert X.shape == (5, 3) and Y[0, -1] == 2.0 and X[-1, 0] == pytest.approx(TWO_PI)
    assert g.describe() == "5x3x2.0"


def test_scalar_function_algebra():
    f = ScalarFunction1D(np.sin, np.cos, lambda x: -np.sin(x), name="sin")
    g = ScalarFunction1D(np.cos, lambda x: -np.sin(x), None, name="cos")
    h = 2.0 * f - g
    x = np.linspace(0, 1, 5)
    assert np.allclose(h(x), 2 * np.sin(x) - np.cos(x))
    assert np.allclose(h.derivative(x), 2 * np.cos(x) + np.sin(x))
    with pytest.raises(MissingDerivative):
        h.derivative(x, 2)
    comb = linear_combination([(1.0, f), (1.0, f)], "twice")
    assert comb.name == "twice" and np.allclose(comb(x), 2 * np.sin(x))


def test_strip_field_missing_component():
    fld = StripField(lambda x, y: x + y)
    assert fld.evaluate(("u",), 1.0, 2.0)[0] == 3.0
    with pytest.raises(MissingDerivative):
        fld.evaluate(("ux",), 1.0, 2.0)
