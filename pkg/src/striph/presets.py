"""Named boundary data and small test corpora.

Every boundary preset vanishes at 0 and 2pi and carries analytic first and
second derivatives.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .quadrature import TWO_PI, ScalarFunction1D, linear_combination

PI = math.pi


def xsinx() -> ScalarFunction1D:
    return ScalarFunction1D(
        lambda x: x * np.sin(x),
        lambda x: np.sin(x) + x * np.cos(x),
        lambda x: 2.0 * np.cos(x) - x * np.sin(x),
        "Cinf",
        "xsinx",
    )


def sinx() -> ScalarFunction1D:
    return ScalarFunction1D(np.sin, np.cos, lambda x: -np.sin(x), "Cinf", "sinx")


def poly() -> ScalarFunction1D:
    """``x (2pi - x)(pi - x) = 2pi^2 x - 3pi x^2 + x^3``."""
    return ScalarFunction1D(
        lambda x: x * (TWO_PI - x) * (PI - x),
        lambda x: 2.0 * PI**2 - 6.0 * PI * x + 3.0 * x**2,
        lambda x: 6.0 * x - 6.0 * PI,
        "Cinf",
        "poly",
    )


def zero() -> ScalarFunction1D:
    z = lambda x: np.zeros_like(x)  # noqa: E731
    return ScalarFunction1D(z, z, z, "Cinf", "zero")


def sin_k(k: int) -> ScalarFunction1D:
    return ScalarFunction1D(
        lambda x: np.sin(k * x), lambda x: k * np.cos(k * x), lambda x: -k * k * np.sin(k * x), "Cinf", f"sin{k}x"
    )


def cos_k(k: int) -> ScalarFunction1D:
    return ScalarFunction1D(
        lambda x: np.cos(k * x), lambda x: -k * np.sin(k * x), lambda x: -k * k * np.cos(k * x), "Cinf", f"cos{k}x"
    )


def x_sin_k(k: int) -> ScalarFunction1D:
    return ScalarFunction1D(
        lambda x: x * np.sin(k * x),
        lambda x: np.sin(k * x) + k * x * np.cos(k * x),
        lambda x: 2.0 * k * np.cos(k * x) - k * k * x * np.sin(k * x),
        "Cinf",
        f"xsin{k}x",
    )


def bell() -> ScalarFunction1D:
    """``x^2 (2pi - x)^2 / pi^3``."""
    return ScalarFunction1D(
        lambda x: (x * (TWO_PI - x)) ** 2 / PI**3,
        lambda x: 2.0 * x * (TWO_PI - x) * (TWO_PI - 2.0 * x) / PI**3,
        lambda x: (2.0 * (TWO_PI - 2.0 * x) ** 2 - 4.0 * x * (TWO_PI - x)) / PI**3,
        "Cinf",
        "bell",
    )


def sin_cubed() -> ScalarFunction1D:
    return ScalarFunction1D(
        lambda x: np.sin(x) ** 3,
        lambda x: 3.0 * np.sin(x) ** 2 * np.cos(x),
        lambda x: 6.0 * np.sin(x) * np.cos(x) ** 2 - 3.0 * np.sin(x) ** 3,
        "Cinf",
        "sin3",
    )


def _one_minus_cos() -> ScalarFunction1D:
    return linear_combination([(1.0, cos_k(0)), (-1.0, cos_k(1))], "1-cosx")


def mean_free(f: ScalarFunction1D) -> ScalarFunction1D:
    """Subtract ``a0c(f) (1 - cos x)`` so the constant dual coefficient vanishes.

    ``1 - cos x`` has ``a0c = 1`` and vanishes at both ends, so the result is
    still admissible boundary data.
    """
    from .basis import biortho_coefficients

    a0 = biortho_coefficients(f, 1).a0c
    return linear_combination([(1.0, f), (-a0, _one_minus_cos())], f"mf({f.name})")


BOUNDARY_PRESETS = {"xsinx": xsinx, "sinx": sinx, "poly": poly, "zero": zero}


def get_boundary(name: str) -> ScalarFunction1D:
    try:
        return BOUNDARY_PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown boundary preset {name!r}; choose from {sorted(BOUNDARY_PRESETS)}") from None


def mean_free_corpus() -> list[ScalarFunction1D]:
    """Ten admissible data whose constant dual coefficient is zero.

    Fields built from such data decay to zero as y grows, so their strip
    norms converge on the unbounded half-strip.
    """
    return [
        xsinx(),
        x_sin_k(2),
        linear_combination([(1.0, cos_k(1)), (-1.0, cos_k(2))], "cos1-cos2"),
        linear_combination([(1.0, cos_k(2)), (-1.0, cos_k(3)), (0.5, x_sin_k(3))], "cos2-cos3+xsin3/2"),
        mean_free(sinx()),
        mean_free(poly()),
        mean_free(sin_k(2)),
        mean_free(bell()),
        mean_free(sin_cubed()),
        mean_free(linear_combination([(1.0, sinx()), (0.25, x_sin_k(4))], "sinx+xsin4x/4")),
    ]


def smooth_corpus() -> list[ScalarFunction1D]:
    """Admissible data with full (infinite) spectra plus a few finite ones."""
    return [
        xsinx(),
        sinx(),
        poly(),
        bell(),
        sin_cubed(),
        sin_k(2),
        sin_k(3),
        x_sin_k(2),
        linear_combination([(1.0, cos_k(1)), (-1.0, cos_k(3))], "cos1-cos3"),
        linear_combination([(1.0, sinx()), (0.1, poly())], "sinx+poly/10"),
    ]


def band_limited_corpus() -> list[ScalarFunction1D]:
    """Trigonometric polynomials, for which finitely many Fourier terms are exact."""
    return [
        sinx(),
        sin_k(3),
        linear_combination([(1.0, cos_k(1)), (-1.0, cos_k(2))], "cos1-cos2"),
        linear_combination([(1.0, cos_k(0)), (0.5, sin_k(2)), (-0.25, cos_k(5))], "1+sin2/2-cos5/4"),
        sin_cubed(),
        linear_combination([(2.0, sin_k(4)), (1.0, cos_k(3))], "2sin4+cos3"),
    ]
