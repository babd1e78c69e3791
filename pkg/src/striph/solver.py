"""Truncated series solution of the Laplace problem on the half-strip.

For boundary data ``f`` with ``f(0) = f(2pi) = 0`` and biorthogonal spectrum
``(a0c, ac, as)``, the field is::

    u(x, y) = a0c + sum_n [ (ac[n] + lam*y*as[n]) cos nx + as[n] x sin nx ] e^{-ny}

Every term satisfies ``u(0, y) = u(2pi, y)`` and ``u_x(0, y) = 0``.  The
field is harmonic exactly when ``lam = 1``; any other value leaves the
residual ``2 (1 - lam) sum_n n as[n] cos nx e^{-ny}``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import polygamma

from . import _kernels
from .basis import COEFF_TOL, BiorthoSpectrum, biortho_coefficients, coeff_decay_bound
from .errors import BadBoundary, Inconclusive, NonzeroH
from .quadrature import FIELD_NAMES, TWO_PI, Grid2D, ScalarFunction1D

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12
DEFAULT_N = 128
HALF_LAMBDA = 0.5
HARMONIC_LAMBDA = 1.0
CALIBRATION_RATIO = 10.0
_H_PROBE = np.linspace(0.0, 50.0, 257)


@dataclass(frozen=True)
class BoundaryDatum:
    """Trace ``f`` on the bottom edge and flux ``h`` on the left edge."""

    f: ScalarFunction1D
    h: Optional[Callable] = None

    def __post_init__(self):
        ends = np.abs(self.f(np.array([0.0, TWO_PI])))
        if np.any(ends > BOUNDARY_TOL):
            raise BadBoundary(f"f must vanish at 0 and 2pi, got f(0)={ends[0]:.3g}, f(2pi)={ends[1]:.3g}")

    @property
    def name(self) -> str:
        return self.f.name

    def h_is_zero(self) -> bool:
        if self.h is None:
            return True
        return bool(np.all(np.asarray(self.h(_H_PROBE), dtype=float) == 0.0))


def _as_datum(f) -> BoundaryDatum:
    return f if isinstance(f, BoundaryDatum) else BoundaryDatum(f)


_ROW = {nm: i for i, nm in enumerate(FIELD_NAMES)}
_ORDER = {"u": 0, "ux": 1, "uy": 1, "uxx": 2, "uxy": 2, "uyy": 2}


@dataclass(frozen=True)
class StripSolution:
    spectrum: BiorthoSpectrum
    lam: float
    f_ref: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def N(self) -> int:
        return self.spectrum.N

    def fields(self, x, y, nderiv: int = 2) -> np.ndarray:
        s = self.spectrum
        return _kernels.series_fields(s.a0c, s.ac, s.as_, self.lam, x, y, nderiv)

    def evaluate(self, names: Sequence[str], x, y) -> np.ndarray:
        nderiv = max(_ORDER[nm] for nm in names)
        rows = self.fields(x, y, nderiv)
        return rows[[_ROW[nm] for nm in names]]

    def to_dict(self) -> dict:
        return {"f": self.f_ref, "N": self.N, "lambda": self.lam, "spectrum": self.spectrum.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "StripSolution":
        spec = BiorthoSpectrum.from_dict(d["spectrum"])
        if spec.N != int(d["N"]):
            raise ValueError("N does not match the stored spectrum")
        return cls(spec, float(d["lambda"]), d.get("f", ""))


def solve(datum, N: int = DEFAULT_N, lam: float = HARMONIC_LAMBDA, tol: float = COEFF_TOL) -> StripSolution:
    """Build the truncated series field for boundary data ``datum`` (h must vanish)."""
    datum = _as_datum(datum)
    if not datum.h_is_zero():
        raise NonzeroH("only h = 0 is supported by the series construction")
    if N < 1:
        raise ValueError("N must be >= 1")
    if not math.isfinite(lam):
        raise ValueError("lambda must be finite")
    spec = biortho_coefficients(datum.f, N, tol)
    return StripSolution(spec, float(lam), datum.name)


def eval_u(sol: StripSolution, x, y):
    return sol.fields(x, y, 0)[0]


def eval_ux(sol: StripSolution, x, y):
    return sol.fields(x, y, 1)[1]


def eval_uy(sol: StripSolution, x, y):
    return sol.fields(x, y, 1)[2]


def eval_uxx(sol: StripSolution, x, y):
    return sol.fields(x, y, 2)[3]


def eval_uxy(sol: StripSolution, x, y):
    return sol.fields(x, y, 2)[4]


def eval_uyy(sol: StripSolution, x, y):
    return sol.fields(x, y, 2)[5]


def fd_laplacian_max(sol: StripSolution, grid: Grid2D) -> float:
    """Max of the 5-point Laplacian of ``u`` over interior grid nodes."""
    X, Y = grid.mesh()
    U = eval_u(sol, X, Y)
    hx, hy = grid.x_grid.h, grid.y_grid.h
    lap = (U[2:, 1:-1] - 2.0 * U[1:-1, 1:-1] + U[:-2, 1:-1]) / hx**2 + (
        U[1:-1, 2:] - 2.0 * U[1:-1, 1:-1] + U[1:-1, :-2]
    ) / hy**2
    return float(np.max(np.abs(lap))) if lap.size else 0.0


def resolved_modes(grid: Grid2D, cap: int = 16) -> int:
    """Number of modes with ``n * h <= 1/4`` on the grid, at least 1."""
    h = max(grid.x_grid.h, grid.y_grid.h)
    return max(1, min(cap, int(0.25 / h)))


def calibrate_lambda(datum, grid: Grid2D, N: Optional[int] = None) -> float:
    """Pick the harmonic multiplier among the two candidates by FD residual.

    By default only the modes the grid resolves are kept, so the stencil's
    truncation error does not swamp the difference between candidates.
    """
    datum = _as_datum(datum)
    N = resolved_modes(grid) if N is None else N
    res = {lam: fd_laplacian_max(solve(datum, N, lam), grid) for lam in (HALF_LAMBDA, HARMONIC_LAMBDA)}
    best = min(res, key=res.get)
    other = HALF_LAMBDA if best == HARMONIC_LAMBDA else HARMONIC_LAMBDA
    log.info("lambda calibration on %s: residual %.3e (lam=%g) vs %.3e (lam=%g)", grid.describe(),
             res[best], best, res[other], other)
    if not res[other] >= CALIBRATION_RATIO * res[best] or res[other] == 0.0:
        raise Inconclusive(f"residuals {res} do not separate the candidates by {CALIBRATION_RATIO}x")
    return best


def mode_ode_residual(
    sol: StripSolution, n: int, y_samples, form: str = "general"
) -> tuple[float, float]:
    """Residuals of the two ODEs obeyed by the n-th sine and cosine mode functions.

    ``form="general"`` uses ``u_c'' = n^2 u_c - 2 lam n u_s``; ``form="literal"``
    uses ``u_c'' = n^2 u_c - n u_s`` regardless of ``lam``.
    """
    if not 1 <= n <= sol.N:
        raise ValueError(f"mode index must be in 1..{sol.N}")
    if form not in ("general", "literal"):
        raise ValueError("form must be 'general' or 'literal'")
    y = np.asarray(y_samples, dtype=float)
    ac, as_, lam = sol.spectrum.ac[n - 1], sol.spectrum.as_[n - 1], sol.lam
    e = np.exp(-n * y)
    us = as_ * e
    us2 = n * n * as_ * e
    coef = ac + lam * y * as_
    uc = coef * e
    uc2 = (-2.0 * n * lam * as_ + n * n * coef) * e
    k = 2.0 * lam * n if form == "general" else float(n)
    res_s = float(np.max(np.abs(us2 - n * n * us)))
    res_c = float(np.max(np.abs(uc2 - n * n * uc + k * us)))
    return res_s, res_c


def _is_finite_spectrum(spec: BiorthoSpectrum) -> bool:
    """True when the upper half of the spectrum is quadrature noise."""
    if spec.N < 2:
        return False
    scale = max(abs(spec.a0c), float(np.max(np.abs(spec.ac))), float(np.max(np.abs(spec.as_))), 1e-300)
    half = spec.N // 2
    upper = np.maximum(np.abs(spec.ac[half:]), np.abs(spec.as_[half:]))
    return bool(np.all(upper <= 1e-13 * scale))


def tail_bound(c: float, N: int, y: float, lam: float = 1.0) -> float:
    """Bound on ``sum_{n>N} c/n^2 (1 + lam*y + 2pi) e^{-ny}``."""
    amp = c * (1.0 + abs(lam) * y + TWO_PI)
    s = float(polygamma(1, N + 1))
    if y > 0:
        s = min(s, math.exp(-(N + 1) * y) / ((N + 1) ** 2 * -math.expm1(-y)))
    return amp * s


def tail_estimate(sol: StripSolution, y: float) -> float:
    """Upper bound on the modes dropped by the truncation, at height ``y``."""
    if y < 0:
        raise ValueError("y must be >= 0")
    spec = sol.spectrum
    if _is_finite_spectrum(spec):
        return 0.0
    return tail_bound(coeff_decay_bound(spec), spec.N, y, sol.lam)


def field_table(sol: StripSolution, grid: Grid2D) -> np.ndarray:
    """Rows ``x, y, u, ux, uy, uxx, uyy`` over the grid, y varying fastest."""
    X, Y = grid.mesh()
    F = sol.fields(X, Y, 2)
    cols = [X, Y, F[0], F[1], F[2], F[3], F[5]]
    return np.stack([c.ravel() for c in cols], axis=1)


FIELD_CSV_HEADER = ("x", "y", "u", "ux", "uy", "uxx", "uyy")
