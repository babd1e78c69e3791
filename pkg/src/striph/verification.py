"""Measurable residuals for candidate solutions on the half-strip.

Each check turns a qualitative property of the boundary-value problem into a
number: the Laplacian of the field, the weak-form identity against smooth test
functions, the boundary conditions, the trace on y = 0, and the ratio of the
strip norm of the field to the norm of its boundary datum.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .basis import spectrum_function
from .errors import BadBoundary
from .quadrature import TWO_PI, Grid1D, Grid2D, ScalarFunction1D, integrate, make_uniform_grid1d
from .solver import StripSolution, _as_datum, solve, tail_estimate
from .weights import NormKind, Weight, WeightedNormSpec, strip_norm_segments, weighted_lp_norm_J, weighted_w1p_norm_J

Y_MIN = 1e-3
WEAK_TOL = 1e-10
NORM_LADDER = (1.0, 2.0, 4.0, 8.0, 16.0)
HARMONIC_TOL = 1e-8


# ------------------------------------------------------------ test functions


def bump(xi: float) -> ScalarFunction1D:
    """``exp(-1/(1-t^2))`` with ``t = 2y/xi - 1``, zero outside ``(0, xi)``."""
    if not xi > 0:
        raise ValueError("bump support must be positive")

    def parts(y):
        y = np.asarray(y, dtype=float)
        t = 2.0 * y / xi - 1.0
        inside = np.abs(t) < 1.0
        q = np.where(inside, 1.0 - t * t, 1.0)
        val = np.where(inside, np.exp(-1.0 / q), 0.0)
        return t, q, val

    def f(y):
        return parts(y)[2]

    def d1(y):
        t, q, val = parts(y)
        return val * (-2.0 * t / q**2) * (2.0 / xi)

    return ScalarFunction1D(f, d1, None, "Cinf", f"bump(0,{xi:g})")


@dataclass(frozen=True)
class TestFunction:
    """``phi(x, y) = eta(x) psi(y)`` with ``eta(2pi) = 0`` and ``psi`` supported in ``[0, xi_phi]``."""

    __test__ = False  # not a pytest class

    eta: ScalarFunction1D
    psi: ScalarFunction1D
    xi_phi: float

    def __post_init__(self):
        if abs(float(self.eta(TWO_PI))) > 1e-12:
            raise BadBoundary(f"test factor {self.eta.name} must vanish at 2pi")
        if not (self.eta.has_d1 and self.psi.has_d1):
            raise ValueError("test factors need first derivatives")
        if not math.isfinite(self.xi_phi) or self.xi_phi <= 0:
            raise ValueError("xi_phi must be finite and positive")

    @property
    def name(self) -> str:
        return f"{self.eta.name}*{self.psi.name}"


def _sin_eta(n: int) -> ScalarFunction1D:
    return ScalarFunction1D(lambda x: np.sin(n * x), lambda x: n * np.cos(n * x), None, "Cinf", f"sin{n}x")


def _weighted_cos_eta(m: int) -> ScalarFunction1D:
    def f(x):
        return x * (TWO_PI - x) * np.cos(m * x)

    def d1(x):
        return (TWO_PI - 2.0 * x) * np.cos(m * x) - m * x * (TWO_PI - x) * np.sin(m * x)

    return ScalarFunction1D(f, d1, None, "Cinf", f"x(2pi-x)cos{m}x")


def standard_battery() -> list[TestFunction]:
    """Sixteen tests: ``sin nx`` (n = 1..8) and ``x(2pi-x) cos mx`` (m = 0..7) times bumps."""
    tests = [TestFunction(_sin_eta(n), bump(2.0), 2.0) for n in range(1, 9)]
    tests += [TestFunction(_weighted_cos_eta(m), bump(3.0), 3.0) for m in range(8)]
    return tests


# ------------------------------------------------------------ residuals


def residual_grid(n_x: int, n_y: int, xi: float, y_min: float = Y_MIN) -> Grid2D:
    """Uniform grid on ``[0, 2pi] x [y_min, xi]``."""
    if not 0 <= y_min < xi:
        raise ValueError("need 0 <= y_min < xi")
    return Grid2D(make_uniform_grid1d(0.0, TWO_PI, n_x), make_uniform_grid1d(y_min, xi, n_y), float(xi))


def refine(grid: Grid2D) -> Grid2D:
    """Halve both spacings, keeping the same bounds."""

    def half(g: Grid1D) -> Grid1D:
        return make_uniform_grid1d(g.a, g.b, 2 * len(g) - 1)

    return Grid2D(half(grid.x_grid), half(grid.y_grid), grid.xi)


def _fd_max(field, grid: Grid2D) -> float:
    X, Y = grid.mesh()
    U = field.evaluate(("u",), X, Y)[0]
    hx, hy = grid.x_grid.h, grid.y_grid.h
    lap = (U[2:, 1:-1] - 2.0 * U[1:-1, 1:-1] + U[:-2, 1:-1]) / hx**2 + (
        U[1:-1, 2:] - 2.0 * U[1:-1, 1:-1] + U[1:-1, :-2]
    ) / hy**2
    return float(np.max(np.abs(lap)))


def laplacian_residual(field, grid: Grid2D, mode: str = "analytic") -> tuple[float, Optional[float]]:
    """Max Laplacian residual over the grid and, for FD mode, its refinement order.

    ``analytic`` sums the exact second derivatives at every grid node.
    ``finite_difference`` applies the 5-point stencil to ``u`` at interior
    nodes of ``grid`` and of its refinement; the order is ``log2`` of the
    ratio (``None`` when both residuals vanish).
    """
    if mode == "analytic":
        X, Y = grid.mesh()
        uxx, uyy = field.evaluate(("uxx", "uyy"), X, Y)
        return float(np.max(np.abs(uxx + uyy))), None
    if mode != "finite_difference":
        raise ValueError("mode must be 'analytic' or 'finite_difference'")
    coarse = _fd_max(field, grid)
    fine = _fd_max(field, refine(grid))
    if coarse == 0.0 and fine == 0.0:
        return 0.0, None
    order = math.log2(coarse / fine) if fine > 0 else math.inf
    return fine, order


def weak_form_residual(field, h: Optional[Callable], tests: Sequence[TestFunction], tol: float = WEAK_TOL) -> list[float]:
    """``|int int (u_x phi_x + u_y phi_y) + int phi(0, y) h(y) dy|`` for each test.

    Tests sharing a support height are integrated together: the inner
    x-integrals ``int u_x eta' dx`` and ``int u_y eta dx`` depend only on ``eta``.
    """
    out = [0.0] * len(tests)
    groups: dict[float, list[int]] = {}
    for i, t in enumerate(tests):
        groups.setdefault(float(t.xi_phi), []).append(i)

    for xi_phi, idx in groups.items():
        group = [tests[i] for i in idx]
        k = len(group)

        def outer(y, group=group, k=k):
            ys = y.ravel()
            ny = ys.size

            def F(x):
                xs = x.ravel()
                ux, uy = field.evaluate(("ux", "uy"), xs[None, :], ys[:, None])
                rows = [ux * t.eta.derivative(xs)[None, :] for t in group]
                rows += [uy * t.eta(xs)[None, :] for t in group]
                return np.stack(rows).reshape((2 * k * ny,) + x.shape)

            A, B = np.asarray(integrate(F, (0.0, TWO_PI), tol * 1e-2)).reshape(2, k, ny)
            rows = []
            for j, t in enumerate(group):
                val = A[j] * t.psi(ys) + B[j] * t.psi.derivative(ys)
                if h is not None:
                    val = val + float(t.eta(0.0)) * t.psi(ys) * np.asarray(h(ys), dtype=float)
                rows.append(val)
            return np.stack(rows).reshape((k,) + y.shape)

        vals = np.atleast_1d(np.asarray(integrate(outer, (0.0, xi_phi), tol)))
        for i, v in zip(idx, vals):
            out[i] = abs(float(v))
    return out


def trace_error(sol: StripSolution, f, w: Weight, p: float, y: float = 0.0) -> float:
    """``||u(., y) - f||`` in the weighted ``L^p(J)`` norm."""
    return weighted_lp_norm_J(lambda x: sol.fields(x, np.full_like(x, y), 0)[0] - f(x), w, p)


@dataclass
class BoundaryReport:
    periodicity_max: float
    ux_at_0_max: float
    trace_error: float
    trace_sup: float
    trace_table: list = field(default_factory=list)


def boundary_report(
    sol: StripSolution, y_samples, x_samples, w: Weight, p: float, f: Optional[ScalarFunction1D] = None
) -> BoundaryReport:
    """Left/right periodicity, the flux at x = 0, and trace errors.

    ``trace_table`` holds ``(y, ||u(., y) - f||)`` pairs for ``y_samples``.
    Without ``f`` the trace entries are measured against the truncated
    expansion at y = 0 itself, so only the y-decay is reported.
    """
    ys = np.asarray(y_samples, dtype=float)
    xs = np.asarray(x_samples, dtype=float)
    left = sol.fields(np.zeros_like(ys), ys, 1)
    right = sol.fields(np.full_like(ys, TWO_PI), ys, 0)
    periodicity = float(np.max(np.abs(left[0] - right[0])))
    ux0 = float(np.max(np.abs(left[1])))
    ref = f if f is not None else spectrum_function(sol.spectrum)
    err0 = trace_error(sol, ref, w, p, 0.0)
    sup = float(np.max(np.abs(sol.fields(xs, np.zeros_like(xs), 0)[0] - ref(xs)))) if xs.size else 0.0
    table = [(float(y), trace_error(sol, ref, w, p, float(y))) for y in ys]
    return BoundaryReport(periodicity, ux0, err0, sup, table)


def norm_estimate_ratio(
    sol: StripSolution, datum, w: Weight, p: float, ladder: Sequence[float] = NORM_LADDER, tol: float = 1e-10
) -> dict[float, Optional[float]]:
    """``strip W^{1,p} mixed norm of u over (0, xi) / W^{1,p} norm of f`` for each ``xi`` on the ladder.

    The ratio is ``None`` when the datum has zero norm.
    """
    datum = _as_datum(datum)
    ladder = sorted(float(x) for x in ladder)
    denom = weighted_w1p_norm_J(datum.f, w, p)
    spec = WeightedNormSpec(p, w, NormKind.W1p_Pi_mixed)
    segs = strip_norm_segments(sol, spec, [0.0] + ladder, tol)
    cum = np.cumsum(segs)
    if denom == 0.0:
        return {xi: None for xi in ladder}
    return {xi: float(c / denom) for xi, c in zip(ladder, cum)}


def ladder_drift(ratios: dict, lo: float, hi: float) -> float:
    """Relative change of a ratio ladder between ``lo`` and ``hi``."""
    a, b = ratios[lo], ratios[hi]
    return abs(b - a) / abs(b)


def superposition_check(f1, f2, alpha: float, beta: float, probe_points, N: int = 64, lam: float = 1.0) -> float:
    """Max over probes of ``|u[a f1 + b f2] - a u[f1] - b u[f2]|``, including derivatives."""
    f1 = _as_datum(f1).f
    f2 = _as_datum(f2).f
    combo = f1 * alpha + f2 * beta
    xs, ys = (np.asarray(c, dtype=float) for c in probe_points)
    u = solve(combo, N, lam).fields(xs, ys)
    u1 = solve(f1, N, lam).fields(xs, ys)
    u2 = solve(f2, N, lam).fields(xs, ys)
    return float(np.max(np.abs(u - alpha * u1 - beta * u2)))


# ------------------------------------------------------------ bundled report


@dataclass
class ResidualReport:
    laplacian_max: float
    laplacian_order: Optional[float]
    fd_residual: float
    weak_residuals: list
    ux_at_0_max: float
    periodicity_max: float
    trace_error: float
    trace_error_y_min: float
    norm_ratio: Optional[float]
    w2_norm: float
    w2_norm_drift: float
    tail_bound: float
    lambda_used: float
    N: int
    grid: str
    harmonic: bool
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def strong_solution_check(
    sol: StripSolution,
    w: Weight,
    p: float,
    xi: float,
    f: Optional[ScalarFunction1D] = None,
    *,
    n_grid: int = 65,
    y_min: float = Y_MIN,
    tests: Optional[Sequence[TestFunction]] = None,
    tol: float = 1e-10,
) -> ResidualReport:
    """Bundle the Laplacian, weak-form, boundary, trace and norm checks for one field."""
    grid = residual_grid(n_grid, n_grid, xi, y_min)
    lap, _ = laplacian_residual(sol, grid, "analytic")
    fd, order = laplacian_residual(sol, grid, "finite_difference")
    tests = standard_battery() if tests is None else tests
    weak = weak_form_residual(sol, None, tests, WEAK_TOL)
    ys = np.linspace(0.0, xi, 33)
    br = boundary_report(sol, ys, grid.x_grid.points, w, p, f)
    trace_ymin = trace_error(sol, f if f is not None else spectrum_function(sol.spectrum), w, p, y_min)

    w2 = WeightedNormSpec(p, w, NormKind.W2p_Pi_mixed)
    segs = strip_norm_segments(sol, w2, [y_min, xi / 2.0, xi], tol)
    w2_norm = float(np.sum(segs))
    drift = float(segs[1] / w2_norm) if w2_norm > 0 else 0.0

    ratio = None
    if f is not None:
        ratios = norm_estimate_ratio(sol, f, w, p, (xi,), tol)
        ratio = ratios[float(xi)]

    return ResidualReport(
        laplacian_max=lap,
        laplacian_order=order,
        fd_residual=fd,
        weak_residuals=weak,
        ux_at_0_max=br.ux_at_0_max,
        periodicity_max=br.periodicity_max,
        trace_error=br.trace_error,
        trace_error_y_min=trace_ymin,
        norm_ratio=ratio,
        w2_norm=w2_norm,
        w2_norm_drift=drift,
        tail_bound=tail_estimate(sol, y_min),
        lambda_used=sol.lam,
        N=sol.N,
        grid=grid.describe(),
        harmonic=lap <= HARMONIC_TOL + tail_estimate(sol, y_min),
        provenance={
            "f": sol.f_ref,
            "weight": w.name,
            "p": p,
            "xi": xi,
            "y_min": y_min,
            "weak_tol": WEAK_TOL,
            "norm_tol": tol,
            "tests": [t.name for t in tests],
        },
    )
