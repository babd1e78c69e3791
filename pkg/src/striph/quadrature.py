"""Grids, 1-D function wrappers and adaptive Gauss-Legendre quadrature.

Every integral in the package goes through :func:`integrate_many`.  It runs a
dyadic adaptive scheme on a fixed-order Gauss-Legendre panel rule and is
vectorised over panels, so a whole family of intervals (or a batch of
integrands) is refined in one pass.

Endpoint singularities listed in ``singular_points`` are removed with the
substitution ``x = s + d t**10`` before the panel rule sees them; a
semi-infinite upper limit is mapped with ``x = a + t / (1 - t)``.
Mapped abscissae are rounded to doubles, so a singularity at a nonzero
endpoint ``s`` is resolved only down to ``ulp(s)``; integrands that blow up
there should be rewritten in the offset variable ``x - s`` (as
:func:`striph.weights.weighted_integral` does).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BadDimension, MissingDerivative, NonFinite, ToleranceNotReached

TWO_PI = 2.0 * math.pi

GL_ORDER = 12
DEPTH_CAP = 40
MAX_ACTIVE_PANELS = 200_000
SINGULAR_POWER = 10

_GL_T, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
# nodes/weights on [0, 1]
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W

_LINEAR, _SING_LO, _SING_HI, _SEMI_INF = 0, 1, 2, 3


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"interval endpoints must be finite, got ({self.a}, {self.b})")
        if not self.b > self.a:
            raise ValueError(f"interval needs a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class Grid1D:
    points: np.ndarray
    h: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise BadDimension("grid needs a nonempty 1-D array of points")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])


@dataclass(frozen=True)
class Grid2D:
    x_grid: Grid1D
    y_grid: Grid1D
    xi: float

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError("xi must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x_grid), len(self.y_grid)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` with ``X[i, j] = x_i``, ``Y[i, j] = y_j``."""
        return np.meshgrid(self.x_grid.points, self.y_grid.points, indexing="ij")

    def describe(self) -> str:
        nx, ny = self.shape
        return f"{nx}x{ny}x{self.xi!r}"


def make_uniform_grid1d(a: float, b: float, n: int) -> Grid1D:
    if n < 2:
        raise BadDimension(f"need at least 2 points, got {n}")
    pts = np.linspace(a, b, n)
    return Grid1D(pts, (b - a) / (n - 1))


def make_uniform_grid2d(n_x: int, n_y: int, xi: float) -> Grid2D:
    """Uniform grid on ``[0, 2pi] x [0, xi]`` including all four edges."""
    if n_x < 3 or n_y < 3:
        raise BadDimension(f"grid counts must be >= 3, got ({n_x}, {n_y})")
    if not xi > 0:
        raise ValueError("xi must be positive")
    return Grid2D(make_uniform_grid1d(0.0, TWO_PI, n_x), make_uniform_grid1d(0.0, xi, n_y), float(xi))


@dataclass(frozen=True)
class ScalarFunction1D:
    """A vectorised real function with optional analytic derivatives.

    Supports ``f + g``, ``f - g``, ``c * f`` and ``-f``; derivatives are
    carried along whenever both operands have them.
    """

    func: Callable[[np.ndarray], np.ndarray]
    d1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    d2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    smoothness: str = "C2"
    name: str = ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.func(x), dtype=float), x.shape) * 1.0

    def derivative(self, x, order: int = 1):
        fn = {1: self.d1, 2: self.d2}.get(order)
        if fn is None:
            raise MissingDerivative(f"{self.name or 'function'} has no derivative of order {order}")
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape) * 1.0

    @property
    def has_d1(self) -> bool:
        return self.d1 is not None

    def __add__(self, other: "ScalarFunction1D") -> "ScalarFunction1D":
        return linear_combination([(1.0, self), (1.0, other)])

    def __sub__(self, other: "ScalarFunction1D") -> "ScalarFunction1D":
        return linear_combination([(1.0, self), (-1.0, other)])

    def __mul__(self, c: float) -> "ScalarFunction1D":
        return linear_combination([(float(c), self)])

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarFunction1D":
        return linear_combination([(-1.0, self)])


_SMOOTH_RANK = {"continuous": 0, "C1": 1, "C2": 2, "Cinf": 3}


def linear_combination(terms: Sequence[tuple[float, ScalarFunction1D]], name: str = "") -> ScalarFunction1D:
    terms = [(float(c), f) for c, f in terms]

    def comb(attr):
        fns = [getattr(f, attr) for _, f in terms]
        if any(fn is None for fn in fns):
            return None

        def g(x):
            out = np.zeros_like(np.asarray(x, dtype=float))
            for (c, _), fn in zip(terms, fns):
                out = out + c * fn(x)
            return out

        return g

    smooth = min((f.smoothness for _, f in terms), key=lambda s: _SMOOTH_RANK.get(s, 0))
    if not name:
        name = " + ".join(f"{c!r}*({f.name})" for c, f in terms)
    return ScalarFunction1D(comb("func"), comb("d1"), comb("d2"), smooth, name)


@dataclass
class QuadResult:
    value: np.ndarray
    converged: bool
    depth: int
    panels: int
    error_estimate: float = field(default=0.0)


def _map_nodes(t, lo, hi, kind):
    """Map t in [0, 1] to x for each root panel; return ``(x, jacobian)``."""
    d = hi - lo
    x = lo + d * t
    jac = np.broadcast_to(d, t.shape).astype(float)
    if np.any(kind != _LINEAR):
        tp = t ** SINGULAR_POWER
        dtp = SINGULAR_POWER * t ** (SINGULAR_POWER - 1)
        m = kind == _SING_LO
        x = np.where(m, lo + d * tp, x)
        jac = np.where(m, d * dtp, jac)
        m = kind == _SING_HI
        x = np.where(m, hi - d * tp, x)
        jac = np.where(m, d * dtp, jac)
        m = kind == _SEMI_INF
        if np.any(m):
            one_minus = np.where(m, 1.0 - t, 1.0)
            x = np.where(m, lo + t / one_minus, x)
            jac = np.where(m, 1.0 / one_minus**2, jac)
    return x, jac


def _eval_batch(f, x):
    vals = np.asarray(f(x), dtype=float)
    if vals.shape == x.shape:
        vals = vals[None, ...]
    if vals.shape[-x.ndim:] != x.shape:
        raise ValueError(f"integrand returned shape {vals.shape} for input shape {x.shape}")
    if not np.all(np.isfinite(vals)):
        bad = x[np.nonzero(~np.isfinite(vals).reshape((-1,) + x.shape).any(axis=0))]
        raise NonFinite(f"integrand is not finite at x = {bad.ravel()[:5]}")
    return vals


def _panel_sums(f, ta, tb, lo, hi, kind):
    """Gauss-Legendre sums over t-panels [ta, tb]; returns shape (m, k)."""
    w = (tb - ta)[:, None]
    t = ta[:, None] + w * _GL_T[None, :]
    x, jac = _map_nodes(t, lo[:, None], hi[:, None], kind[:, None])
    vals = _eval_batch(f, x)
    return np.einsum("...kj,j->...k", vals * jac, _GL_W) * w[:, 0]


def _adaptive(f, lo, hi, kind, atol, rtol=0.0, depth_cap=DEPTH_CAP):
    """Adaptive quadrature over several root panels at once.

    ``lo, hi, kind, atol`` are arrays with one entry per root.  Returns
    ``(values, converged_per_root, depth_reached, panels_used, err)`` with
    ``values`` shaped ``(m, n_roots)``.
    """
    n_roots = lo.size
    roots = np.arange(n_roots)
    ta = np.zeros(n_roots)
    tb = np.ones(n_roots)
    q_whole = _panel_sums(f, ta, tb, lo, hi, kind)
    m = q_whole.shape[0]
    total = np.zeros((m, n_roots))
    converged = np.ones(n_roots, dtype=bool)
    err_total = 0.0
    panels_used = n_roots
    depth = 0
    while roots.size:
        depth += 1
        mid = 0.5 * (ta + tb)
        both_a = np.concatenate([ta, mid])
        both_b = np.concatenate([mid, tb])
        r2 = np.concatenate([roots, roots])
        q2 = _panel_sums(f, both_a, both_b, lo[r2], hi[r2], kind[r2])
        k = roots.size
        q_left, q_right = q2[:, :k], q2[:, k:]
        q_split = q_left + q_right
        err = np.max(np.abs(q_split - q_whole), axis=0)
        width = tb - ta
        local = atol[roots] * width
        if rtol > 0.0:
            est = total.copy()
            np.add.at(est.T, roots, np.abs(q_split).T)
            scale = np.max(np.abs(est), axis=0)[roots]
            local = np.maximum(local, rtol * scale * width)
        # floor at roundoff level of the panel value
        local = np.maximum(local, 64 * np.finfo(float).eps * np.max(np.abs(q_split), axis=0))
        ok = err <= local
        capped = depth >= depth_cap or 2 * np.count_nonzero(~ok) > MAX_ACTIVE_PANELS
        if capped:
            converged[np.unique(roots[~ok])] = False
            ok[:] = True
        if np.any(ok):
            np.add.at(total.T, roots[ok], q_split[:, ok].T)
            err_total += float(np.sum(err[ok]))
        keep = ~ok
        if not np.any(keep):
            break
        roots = np.concatenate([roots[keep], roots[keep]])
        ta, tb = np.concatenate([ta[keep], mid[keep]]), np.concatenate([mid[keep], tb[keep]])
        q_whole = np.concatenate([q_left[:, keep], q_right[:, keep]], axis=1)
        panels_used += roots.size
    return total, converged, depth, panels_used, err_total


def _split_roots(a, b, singular_points):
    """Split [a, b] into root panels so each singularity sits at an endpoint."""
    if math.isinf(b):
        finite = [s for s in singular_points if a < s < math.inf]
        cut = max([a + 1.0] + [s + 1.0 for s in finite])
        return _split_roots(a, cut, singular_points) + [(cut, math.inf, _SEMI_INF)]
    sing = sorted({float(s) for s in singular_points if a <= s <= b})
    cuts = sorted({a, b, *[s for s in sing if a < s < b]})
    roots = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        at_lo = any(abs(lo - s) <= 1e-15 * max(1.0, abs(s)) for s in sing)
        at_hi = any(abs(hi - s) <= 1e-15 * max(1.0, abs(s)) for s in sing)
        if at_lo and at_hi:
            mid = 0.5 * (lo + hi)
            roots += [(lo, mid, _SING_LO), (mid, hi, _SING_HI)]
        elif at_lo:
            roots.append((lo, hi, _SING_LO))
        elif at_hi:
            roots.append((lo, hi, _SING_HI))
        else:
            roots.append((lo, hi, _LINEAR))
    return roots


def integrate_many(
    f,
    intervals: Sequence[tuple[float, float]],
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    singular_points: Sequence[float] = (),
    depth_cap: int = DEPTH_CAP,
    full_output: bool = False,
):
    """Integrate ``f`` over each interval in one vectorised adaptive pass.

    ``f`` maps an array ``x`` to values of the same shape, or to a batch of
    shape ``(m,) + x.shape``.  Returns an array of shape ``(len(intervals),)``
    or ``(m, len(intervals))``; ``tol`` is the absolute target per interval.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    los, his, kinds, owners, atols = [], [], [], [], []
    for i, (a, b) in enumerate(intervals):
        a, b = float(a), float(b)
        if not b > a:
            raise ValueError(f"interval needs a < b, got ({a}, {b})")
        pieces = _split_roots(a, b, singular_points)
        span = sum((hi - lo) for lo, hi, _ in pieces if math.isfinite(hi))
        for lo, hi, kind in pieces:
            share = 0.5 if kind == _SEMI_INF else (hi - lo) / span
            if math.isinf(b) and kind != _SEMI_INF:
                share *= 0.5
            los.append(lo)
            his.append(hi if math.isfinite(hi) else 0.0)
            kinds.append(kind)
            owners.append(i)
            atols.append(tol * share)
    vals, conv, depth, panels, err = _adaptive(
        f, np.array(los), np.array(his), np.array(kinds), np.array(atols), rtol, depth_cap
    )
    owners = np.array(owners)
    out = np.zeros((vals.shape[0], len(intervals)))
    np.add.at(out.T, owners, vals.T)
    all_conv = bool(np.all(conv))
    if not all_conv:
        warnings.warn(
            ToleranceNotReached(f"adaptive quadrature hit its cap (depth {depth}); best estimate returned"),
            stacklevel=2,
        )
    scalar_batch = out.shape[0] == 1 and _is_scalar_integrand(f, los, his, kinds)
    res = out[0] if scalar_batch else out
    if full_output:
        return QuadResult(res, all_conv, depth, panels, err)
    return res


def _is_scalar_integrand(f, los, his, kinds):
    t = np.array([[0.5]])
    x, _ = _map_nodes(t, np.array([[los[0]]]), np.array([[his[0]]]), np.array([[kinds[0]]]))
    return np.asarray(f(x)).shape == x.shape


def integrate(
    f,
    interval,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    singular_points: Sequence[float] = (),
    depth_cap: int = DEPTH_CAP,
    full_output: bool = False,
):
    """Integrate ``f`` over ``interval`` (an :class:`Interval` or ``(a, b)``).

    ``b`` may be ``math.inf``.  Returns a float for scalar integrands, an array
    for batched ones, or a :class:`QuadResult` with ``full_output=True``.

    >>> round(integrate(np.sin, (0.0, math.pi)), 12)
    2.0
    """
    if isinstance(interval, Interval):
        a, b = interval.a, interval.b
    else:
        a, b = interval
    res = integrate_many(
        f, [(a, b)], tol, rtol=rtol, singular_points=singular_points, depth_cap=depth_cap, full_output=True
    )
    val = res.value[..., 0]
    if np.ndim(val) == 0:
        val = float(val)
    if full_output:
        res.value = val
        return res
    return val


FIELD_NAMES = ("u", "ux", "uy", "uxx", "uxy", "uyy")


class StripField:
    """A field on the half-strip given by callables ``g(x, y)``.

    Anything with an ``evaluate(names, x, y)`` method can stand in for this
    class; :class:`striph.solver.StripSolution` does so without the callables.
    """

    def __init__(self, u, ux=None, uy=None, uxx=None, uxy=None, uyy=None, name: str = ""):
        self._fns = {"u": u, "ux": ux, "uy": uy, "uxx": uxx, "uxy": uxy, "uyy": uyy}
        self.name = name

    def evaluate(self, names: Sequence[str], x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.empty((len(names),) + x.shape)
        for i, nm in enumerate(names):
            fn = self._fns.get(nm)
            if fn is None:
                raise MissingDerivative(f"field {self.name or '?'} has no component {nm!r}")
            out[i] = fn(x, y)
        return out
