"""Muckenhoupt weights on the period [0, 2pi] and the weighted norms built on them.

Weights are 2pi-periodic.  Integrals against a weight are taken in offset
coordinates around each singular abscissa (``x = s + delta``), which keeps
full floating-point resolution next to ``x = 2pi`` as well as ``x = 0``.
"""
from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, MalformedCSV, NonFinite, NonMonotoneAbscissae, NotIntegrable, ProbeFailed
from .quadrature import TWO_PI, ScalarFunction1D, integrate, integrate_many

NORM_TOL = 1e-10
NORM_RTOL = 1e-10
NORM_CELLS = 32
NORM_FLOOR = 1e-14
CELL_TOL = 1e-13
# |t|**p has a kink at zeros of the field when p < 2; a relative target on
# the inner x-integrals avoids refining those kinks down to absolute noise
INNER_RTOL = 1e-10
STABLE_GROWTH = 0.10
RH_LADDER = tuple(2.0**-k for k in range(11))

_DIVERGENCE_SHELLS = 24
_DIVERGENCE_RATIO = 0.999


@dataclass(frozen=True)
class Weight:
    """A nonnegative 2pi-periodic weight.

    ``func`` must be 2pi-periodic in its argument (it is called with
    arguments slightly outside ``[0, 2pi]``).  ``singular_points`` lists the
    abscissae in ``[0, 2pi]`` where the weight reaches 0 or infinity.
    """

    func: Callable[[np.ndarray], np.ndarray]
    singular_points: tuple[float, ...] = ()
    name: str = ""

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def near(self, s: float, offset):
        """Evaluate at ``s + offset`` without rounding ``s + offset`` first."""
        s0 = math.fmod(s, TWO_PI)
        if abs(s0) < 1e-13 or abs(s0 - TWO_PI) < 1e-13:
            return self(offset)
        return self(s0 + np.asarray(offset, dtype=float))

    def singular_set(self, a: float, b: float) -> list[float]:
        """All periodic copies of the singular points inside ``[a, b]``."""
        out = set()
        for s in self.singular_points:
            s0 = s % TWO_PI
            k = math.floor((a - s0) / TWO_PI)
            while s0 + k * TWO_PI <= b + 1e-12:
                c = s0 + k * TWO_PI
                if c >= a - 1e-12:
                    out.add(min(max(c, a), b))
                k += 1
        return sorted(out)

    def scaled(self, c: float) -> "Weight":
        return Weight(lambda x, f=self.func: c * f(x), self.singular_points, f"{c!r}*{self.name}")


def one_weight() -> Weight:
    return Weight(lambda x: np.ones_like(x), (), "one")


def power_weight(alpha: float) -> Weight:
    """``|sin(x/2)|**alpha``; singular at multiples of 2pi unless alpha == 0."""
    alpha = float(alpha)
    sing = () if alpha == 0 else (0.0, TWO_PI)
    return Weight(lambda x: np.abs(np.sin(0.5 * x)) ** alpha, sing, f"power:alpha={alpha!r}")


def shifted_weight(c: float) -> Weight:
    """``c + sin x`` with ``c > 1``."""
    c = float(c)
    if not c > 1:
        raise ConfigError(f"shifted weight needs c > 1, got {c}")
    return Weight(lambda x: c + np.sin(x), (), f"shifted:c={c!r}")


_PRESET_RE = re.compile(r"^(power|shifted):(alpha|c)=(.+)$")


def parse_weight(spec: str) -> Weight:
    """Resolve a weight preset name or a CSV path with header ``x,nu``."""
    spec = spec.strip()
    if spec == "one":
        return one_weight()
    m = _PRESET_RE.match(spec)
    if m:
        kind, key, raw = m.groups()
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError(f"bad numeric value in weight spec {spec!r}") from None
        if kind == "power" and key == "alpha":
            return power_weight(val)
        if kind == "shifted" and key == "c":
            return shifted_weight(val)
        raise ConfigError(f"weight preset {kind!r} takes no parameter {key!r}")
    path = Path(spec)
    if path.suffix.lower() == ".csv" or path.exists():
        return load_weight_csv(path)
    raise ConfigError(f"unknown weight spec {spec!r}")


def read_xy_csv(path, value_column: str) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MalformedCSV(f"{path} is empty") from None
        if header != ["x", value_column]:
            raise MalformedCSV(f"{path}: expected header 'x,{value_column}', got {','.join(header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise MalformedCSV(f"{path}:{lineno}: expected 2 columns")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise MalformedCSV(f"{path}:{lineno}: non-numeric entry") from None
    if len(rows) < 4:
        raise MalformedCSV(f"{path}: need at least 4 data rows, got {len(rows)}")
    data = np.array(rows)
    xs, vs = data[:, 0], data[:, 1]
    if np.any(np.diff(xs) <= 0):
        raise NonMonotoneAbscissae(f"{path}: x column must be strictly increasing")
    if not np.all(np.isfinite(data)):
        raise MalformedCSV(f"{path}: non-finite entries")
    return xs, vs


def load_weight_csv(path) -> Weight:
    """Sampled weight, linearly interpolated and extended with period 2pi."""
    xs, nu = read_xy_csv(path, "nu")
    if xs[0] < 0 or xs[-1] > TWO_PI + 1e-12:
        raise MalformedCSV(f"{path}: x must lie in [0, 2pi]")
    if np.any(nu < 0):
        raise MalformedCSV(f"{path}: weight values must be nonnegative")

    def func(x):
        return np.interp(np.mod(x, TWO_PI), xs, nu, period=TWO_PI)

    sing = tuple(float(x) for x, v in zip(xs, nu) if v == 0.0)
    return Weight(func, sing, f"csv:{Path(path).name}")


# ------------------------------------------------------------ integration


def _pow(vals, exponent):
    if exponent == 1.0:
        return vals
    with np.errstate(divide="ignore", invalid="ignore"):
        return vals**exponent


def weighted_integral(
    F, w: Weight, intervals: Sequence[tuple[float, float]], tol: float = NORM_TOL, *, exponent=1.0, rtol=0.0
):
    """``int_I F(x) nu(x)**exponent dx`` for each interval ``I``.

    ``F`` may be ``None`` (meaning 1) or a vectorised callable, possibly
    batched (returning ``(m,) + x.shape``).  Pieces touching a singular point
    are integrated in the offset variable with the singularity at 0.
    """
    regular: list[tuple[float, float]] = []
    owners: list[int] = []
    special: list[tuple[int, float, float, int]] = []
    for i, (a, b) in enumerate(intervals):
        sing = w.singular_set(a, b)
        cuts = sorted({a, b, *sing})
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 0:
                continue
            at_lo = any(abs(lo - s) < 1e-12 for s in sing)
            at_hi = any(abs(hi - s) < 1e-12 for s in sing)
            if at_lo and at_hi:
                mid = 0.5 * (lo + hi)
                special += [(i, lo, mid, +1), (i, hi, hi - mid, -1)]
            elif at_lo:
                special.append((i, lo, hi - lo, +1))
            elif at_hi:
                special.append((i, hi, hi - lo, -1))
            else:
                regular.append((lo, hi))
                owners.append(i)

    def integrand(x):
        vals = _pow(w(x), exponent)
        return vals if F is None else F(x) * vals

    out = None
    if regular:
        res = np.atleast_2d(integrate_many(integrand, regular, tol, rtol=rtol))
        out = np.zeros((res.shape[0], len(intervals)))
        np.add.at(out.T, np.array(owners), res.T)
    for i, s, d, sign in special:

        def g(delta, s=s, sign=sign):
            vals = _pow(w.near(s, sign * delta), exponent)
            return vals if F is None else F(s + sign * delta) * vals

        val = np.atleast_1d(integrate(g, (0.0, d), tol, rtol=rtol, singular_points=(0.0,)))
        if out is None:
            out = np.zeros((val.size, len(intervals)))
        out[:, i] += val
    return out[0] if out.shape[0] == 1 and not _is_batched(F) else out


def _is_batched(F) -> bool:
    if F is None:
        return False
    probe = np.array([0.5, 1.0])
    return np.asarray(F(probe)).shape != probe.shape


def diverges_at(w: Weight, s: float, exponent: float) -> bool:
    """Whether ``nu**exponent`` fails to be integrable next to ``s``.

    Integrates over dyadic shells ``[d 2**-(k+1), d 2**-k]`` on both sides and
    looks at the ratio of successive shell integrals: for an integrable
    power-type singularity it settles strictly below 1.
    """
    d0 = 0.5
    shells = [(d0 * 2.0 ** -(k + 1), d0 * 2.0**-k) for k in range(_DIVERGENCE_SHELLS)]
    for sign in (+1, -1):
        try:
            vals = integrate_many(lambda dl: _pow(w.near(s, sign * dl), exponent), shells, 1e-14, rtol=1e-10)
        except NonFinite:
            return True
        vals = np.abs(vals)
        if not np.all(np.isfinite(vals)) or vals[-2] == 0.0:
            if vals[-1] != 0.0:
                return True
            continue
        if vals[-1] / vals[-2] >= _DIVERGENCE_RATIO:
            return True
    return False


def check_integrable(w: Weight, exponent: float) -> None:
    for s in w.singular_points:
        if diverges_at(w, s, exponent):
            raise NotIntegrable(f"{w.name}**{exponent:g} is not integrable near x = {s:g}")


def cell_integrals(w: Weight, resolution: int, exponent: float = 1.0, tol: float = CELL_TOL) -> np.ndarray:
    edges = np.linspace(0.0, TWO_PI, resolution + 1)
    cells = list(zip(edges[:-1], edges[1:]))
    return np.asarray(weighted_integral(None, w, cells, tol, exponent=exponent, rtol=1e-13))


# --------------------------------------------------------------- A_p tests


@dataclass
class WeightReport:
    p: float
    ap_constant: float
    in_ap: bool
    resolution: int
    ap_constant_refined: float
    growth: float
    inclusion_q: Optional[float] = None
    rh_delta: Optional[float] = None
    rh_constant: Optional[float] = None
    weight: str = ""
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "p": self.p,
            "ap_constant": self.ap_constant,
            "ap_constant_refined": self.ap_constant_refined,
            "growth_per_doubling": self.growth,
            "in_ap": self.in_ap,
            "resolution": self.resolution,
            "inclusion_q": self.inclusion_q,
            "rh_delta": self.rh_delta,
            "rh_constant": self.rh_constant,
            "notes": list(self.notes),
        }


def _check_p(p: float) -> None:
    if not (p > 1 and math.isfinite(p)):
        raise ValueError(f"p must lie in (1, inf), got {p}")


def ap_scan(w: Weight, p: float, resolution: int, periods: int = 1) -> float:
    """Brute sup of the A_p product over runs of grid cells.

    Intervals start on the ``resolution``-point grid and have lengths up to
    ``periods`` full periods.
    """
    cn = cell_integrals(w, resolution, 1.0)
    cs = cell_integrals(w, resolution, -1.0 / (p - 1.0))
    return _kernels.scan_ap(cn, cs, TWO_PI / resolution, p, max_len=periods * resolution)


def muckenhoupt_constant(
    w: Weight, p: float, resolution: int = 256, *, with_inclusion: bool = True, with_rh: bool = True
) -> WeightReport:
    """Estimate ``[nu]_p`` and decide A_p membership by resolution doubling."""
    _check_p(p)
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    check_integrable(w, 1.0)
    check_integrable(w, -1.0 / (p - 1.0))
    h2 = TWO_PI / (2 * resolution)
    cn2 = cell_integrals(w, 2 * resolution, 1.0)
    cs2 = cell_integrals(w, 2 * resolution, -1.0 / (p - 1.0))
    cn = cn2[0::2] + cn2[1::2]
    cs = cs2[0::2] + cs2[1::2]
    if not (np.all(np.isfinite(cn2)) and np.all(np.isfinite(cs2))):
        raise NotIntegrable(f"{w.name}: non-finite cell averages")
    coarse = _kernels.scan_ap(cn, cs, 2 * h2, p)
    fine = _kernels.scan_ap(cn2, cs2, h2, p)
    growth = fine / coarse - 1.0
    report = WeightReport(
        p=p,
        ap_constant=coarse,
        in_ap=bool(math.isfinite(fine) and growth < STABLE_GROWTH),
        resolution=resolution,
        ap_constant_refined=fine,
        growth=growth,
        weight=w.name,
    )
    if report.in_ap and with_rh:
        try:
            report.rh_delta, report.rh_constant = reverse_holder_probe(w, p, resolution, check_ap=False)
        except ProbeFailed as exc:
            report.notes.append(str(exc))
    if report.in_ap and with_inclusion:
        report.inclusion_q = inclusion_search(w, p, max(8, resolution // 2))
    return report


def reverse_holder_probe(w: Weight, p: float, resolution: int = 256, *, check_ap: bool = True) -> tuple[float, float]:
    """Largest ladder exponent delta with a finite reverse-Holder constant.

    Returns ``(delta, C)`` where ``C`` is the observed sup over the interval
    family of ``avg(nu**(1+delta))**(1/(1+delta)) / avg(nu)``.
    """
    _check_p(p)
    if check_ap:
        rep = muckenhoupt_constant(w, p, resolution, with_inclusion=False, with_rh=False)
        if not rep.in_ap:
            raise ValueError(f"{w.name} did not pass the A_{p:g} stabilization test")
    h = TWO_PI / resolution
    cn = cell_integrals(w, resolution, 1.0)
    for delta in RH_LADDER:
        if any(diverges_at(w, s, 1.0 + delta) for s in w.singular_points):
            continue
        cq = cell_integrals(w, resolution, 1.0 + delta)
        if not np.all(np.isfinite(cq)):
            continue
        C = _kernels.scan_rh(cn, cq, h, delta)
        if math.isfinite(C):
            return delta, C
    raise ProbeFailed(f"no reverse-Holder exponent on the ladder worked for {w.name} at resolution {resolution}")


def inclusion_search(w: Weight, p: float, resolution: int, steps: int = 8) -> Optional[float]:
    """Smallest q on a descending grid from p with ``nu`` still passing the A_q test."""
    found = None
    for k in range(1, steps):
        q = p - k * (p - 1.0) / steps
        try:
            rep = muckenhoupt_constant(w, q, resolution, with_inclusion=False, with_rh=False)
        except NotIntegrable:
            break
        if not rep.in_ap:
            break
        found = q
    return found


def embedding_constant(w: Weight, p: float, ap_constant: float) -> float:
    """``2pi [nu]_p**(1/p) ||nu||_1**(-1/p)``, the L^p_nu -> L^1 bound."""
    total = float(weighted_integral(None, w, [(0.0, TWO_PI)], 1e-12)[0])
    return TWO_PI * ap_constant ** (1.0 / p) * total ** (-1.0 / p)


# ------------------------------------------------------------------ norms


class NormKind(enum.Enum):
    Lp_J = "Lp_J"
    W1p_J = "W1p_J"
    mixed_Pi = "mixed_Pi"
    pure_Pi = "pure_Pi"
    W1p_Pi_mixed = "W1p_Pi_mixed"
    W2p_Pi_mixed = "W2p_Pi_mixed"


_STRIP_COMPONENTS = {
    NormKind.mixed_Pi: ("u",),
    NormKind.pure_Pi: ("u",),
    NormKind.W1p_Pi_mixed: ("u", "ux", "uy"),
    NormKind.W2p_Pi_mixed: ("u", "ux", "uy", "uxx", "uxy", "uyy"),
}


@dataclass(frozen=True)
class WeightedNormSpec:
    p: float
    weight: Weight
    norm_kind: NormKind

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))


def _pth_power_J(g, w: Weight, p: float, tol: float) -> float:
    """``int_J |g|**p nu dx`` to ``tol`` absolute, or ``NORM_RTOL`` relative when smaller.

    The relative target is floored at an absolute ``NORM_FLOOR`` on the norm
    itself, since a norm at roundoff level cannot be resolved further.

    ``J`` is pre-split into ``NORM_CELLS`` cells so a single Gauss panel cannot
    alias an oscillatory integrand into a converged-looking estimate.
    """
    edges = np.linspace(0.0, TWO_PI, NORM_CELLS + 1)
    cells = list(zip(edges[:-1], edges[1:]))

    def run(target):
        vals = weighted_integral(lambda x: np.abs(g(x)) ** p, w, cells, target / NORM_CELLS)
        return float(np.sum(vals))

    val = run(tol)
    target = max(NORM_RTOL * val, p * val ** ((p - 1.0) / p) * NORM_FLOOR)
    if 0.0 < target < tol:
        val = run(target)
    return val


def weighted_lp_norm_J(f, w: Weight, p: float, tol: float = NORM_TOL) -> float:
    _check_p(p)
    return _pth_power_J(f, w, p, tol) ** (1.0 / p)


def weighted_w1p_norm_J(f: ScalarFunction1D, w: Weight, p: float, tol: float = NORM_TOL) -> float:
    df = lambda x: f.derivative(x, 1)  # noqa: E731  (raises MissingDerivative early)
    df(np.array([1.0]))
    return weighted_lp_norm_J(f, w, p, tol) + weighted_lp_norm_J(df, w, p, tol)


def l1_norm_J(f, tol: float = NORM_TOL) -> float:
    return _pth_power_J(f, one_weight(), 1.0, tol)


def _inner_pth_powers(field, names, w: Weight, p: float, ys: np.ndarray, tol: float) -> np.ndarray:
    """``int_J |D u(x, y)|**p nu dx`` for each name and each y; shape (k, ny)."""
    ys = np.asarray(ys, dtype=float)
    k = len(names)

    def F(x):
        xs = x.ravel()
        vals = field.evaluate(names, xs[None, :], ys[:, None])
        return (np.abs(vals) ** p).reshape((k * ys.size,) + x.shape)

    res = np.asarray(weighted_integral(F, w, [(0.0, TWO_PI)], tol, rtol=INNER_RTOL))
    return res.reshape(k, ys.size)


def strip_norm_segments(field, spec: WeightedNormSpec, edges: Sequence[float], tol: float = NORM_TOL) -> np.ndarray:
    """Per-segment contributions to a strip norm between consecutive ``edges``.

    For mixed kinds the contributions add up to the norm.  For ``pure_Pi``
    they are p-th powers, which add up to the p-th power of the norm.
    """
    kind = spec.norm_kind
    if kind not in _STRIP_COMPONENTS:
        raise ValueError(f"{kind.value} is not a strip norm")
    names = _STRIP_COMPONENTS[kind]
    p, w = spec.p, spec.weight

    if kind is NormKind.pure_Pi:

        def outer(y):
            return _inner_pth_powers(field, names, w, p, y.ravel(), tol)[0].reshape(y.shape)

    else:

        def outer(y):
            inner = _inner_pth_powers(field, names, w, p, y.ravel(), tol)
            return np.sum(np.maximum(inner, 0.0) ** (1.0 / p), axis=0).reshape(y.shape)

    segs = list(zip(edges[:-1], edges[1:]))
    return np.asarray(integrate_many(outer, segs, tol, rtol=1e-12))


def strip_norm(field, spec: WeightedNormSpec, xi: float, tol: float = NORM_TOL) -> float:
    """Weighted norm of ``field`` over ``(0, 2pi) x (0, xi)``; ``xi`` may be ``inf``."""
    if not xi > 0:
        raise ValueError("xi must be positive")
    total = float(np.sum(strip_norm_segments(field, spec, [0.0, xi], tol)))
    if spec.norm_kind is NormKind.pure_Pi:
        return total ** (1.0 / spec.p)
    return total
