"""The primal system {1, cos nx, x sin nx}, its dual, and expansions on J = (0, 2pi).

Primal::

    y0c = 1,  ync = cos nx,  yns = x sin nx

Dual (biorthonormal to the primal under the L^2(J) pairing)::

    th0c = (2pi - x) / (2 pi^2),  thnc = (2pi - x) cos nx / pi^2,  thns = sin nx / pi^2

Fourier coefficients are kept raw, ``f_n^c = int_0^{2pi} f cos nx dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import EmptyCorpus, InvalidIndex
from .quadrature import TWO_PI, ScalarFunction1D, integrate
from .weights import Weight, weighted_lp_norm_J

PI2 = math.pi**2
COEFF_TOL = 1e-12


@dataclass(frozen=True)
class BasisIndex:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("C", "S"):
            raise InvalidIndex(f"kind must be 'C' or 'S', got {self.kind!r}")
        if self.n < 0 or (self.kind == "S" and self.n == 0):
            raise InvalidIndex(f"invalid basis index ({self.kind}, {self.n})")


def basis_order(N: int) -> list[BasisIndex]:
    """(C,0), (C,1), (S,1), ..., (C,N), (S,N)."""
    out = [BasisIndex("C", 0)]
    for n in range(1, N + 1):
        out += [BasisIndex("C", n), BasisIndex("S", n)]
    return out


def _as_index(idx) -> BasisIndex:
    return idx if isinstance(idx, BasisIndex) else BasisIndex(*idx)


def eval_primal(idx, x):
    idx = _as_index(idx)
    x = np.asarray(x, dtype=float)
    if idx.kind == "C":
        return np.ones_like(x) if idx.n == 0 else np.cos(idx.n * x)
    return x * np.sin(idx.n * x)


def eval_dual(idx, x):
    idx = _as_index(idx)
    x = np.asarray(x, dtype=float)
    if idx.kind == "C":
        if idx.n == 0:
            return (TWO_PI - x) / (2.0 * PI2)
        return (TWO_PI - x) * np.cos(idx.n * x) / PI2
    return np.sin(idx.n * x) / PI2


def _stack(fn, indices, x):
    return np.stack([fn(i, x) for i in indices])


def biortho_gram(N: int, tol: float = 1e-10) -> np.ndarray:
    """Matrix of pairings ``(primal_i ; dual_j)`` in :func:`basis_order`."""
    if N < 1:
        raise ValueError("N must be >= 1")
    idx = basis_order(N)
    K = len(idx)

    def integrand(x):
        P = _stack(eval_primal, idx, x)
        D = _stack(eval_dual, idx, x)
        return (P[:, None] * D[None, :]).reshape((K * K,) + x.shape)

    return np.asarray(integrate(integrand, (0.0, TWO_PI), tol)).reshape(K, K)


@dataclass(frozen=True)
class BiorthoSpectrum:
    a0c: float
    ac: np.ndarray
    as_: np.ndarray
    source: str = ""

    def __post_init__(self):
        ac = np.asarray(self.ac, dtype=float)
        as_ = np.asarray(self.as_, dtype=float)
        if ac.shape != as_.shape or ac.ndim != 1:
            raise ValueError("ac and as must be 1-D arrays of equal length")
        if not (math.isfinite(self.a0c) and np.all(np.isfinite(ac)) and np.all(np.isfinite(as_))):
            raise ValueError("spectrum entries must be finite")
        object.__setattr__(self, "a0c", float(self.a0c))
        object.__setattr__(self, "ac", ac)
        object.__setattr__(self, "as_", as_)

    @property
    def N(self) -> int:
        return self.ac.size

    def truncated(self, n: int, m: Optional[int] = None) -> "BiorthoSpectrum":
        """Keep cosine modes ``<= n`` and sine modes ``<= m`` (zero the rest)."""
        m = n if m is None else m
        ac = self.ac.copy()
        as_ = self.as_.copy()
        ac[n:] = 0.0
        as_[m:] = 0.0
        return BiorthoSpectrum(self.a0c, ac, as_, self.source)

    def to_dict(self) -> dict:
        return {"N": self.N, "a0c": self.a0c, "ac": self.ac.tolist(), "as": self.as_.tolist(), "source": self.source}

    @classmethod
    def from_dict(cls, d: dict) -> "BiorthoSpectrum":
        spec = cls(d["a0c"], np.array(d["ac"], dtype=float), np.array(d["as"], dtype=float), d.get("source", ""))
        if spec.N != int(d["N"]):
            raise ValueError(f"N={d['N']} does not match coefficient lengths {spec.N}")
        return spec


@dataclass(frozen=True)
class FourierSpectrum:
    c: np.ndarray
    s: np.ndarray

    @property
    def N(self) -> int:
        return self.s.size


def biortho_coefficients(f, N: int, tol: float = COEFF_TOL) -> BiorthoSpectrum:
    """Pairings of ``f`` with the dual system up to order ``N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=float)

    def integrand(x):
        fx = f(x)
        nx = n.reshape((-1,) + (1,) * x.ndim) * x
        rows = [fx * (TWO_PI - x) / (2.0 * PI2)]
        cos_rows = fx * (TWO_PI - x) * np.cos(nx) / PI2
        sin_rows = fx * np.sin(nx) / PI2
        return np.concatenate([np.stack(rows), cos_rows, sin_rows])

    vals = np.asarray(integrate(integrand, (0.0, TWO_PI), tol))
    return BiorthoSpectrum(vals[0], vals[1 : N + 1], vals[N + 1 :], getattr(f, "name", ""))


def synthesize(spec: BiorthoSpectrum, x):
    """``a0c + sum(ac[n] cos nx + as[n] x sin nx)``."""
    return _kernels.series_fields(spec.a0c, spec.ac, spec.as_, 0.0, x, 0.0, nderiv=0)[0]


def spectrum_function(spec: BiorthoSpectrum, name: str = "") -> ScalarFunction1D:
    """The finite biorthonormal sum as a function with analytic derivatives."""

    def rows(x, k):
        return _kernels.series_fields(spec.a0c, spec.ac, spec.as_, 0.0, x, 0.0, nderiv=2)[k]

    return ScalarFunction1D(
        lambda x: rows(x, 0), lambda x: rows(x, 1), lambda x: rows(x, 3), "Cinf", name or f"S[{spec.source}]"
    )


def projector_snm(f, n: int, m: int, tol: float = COEFF_TOL) -> ScalarFunction1D:
    """Partial sum with cosine terms ``k <= n`` and ``x sin kx`` terms ``k <= m``."""
    if n < 0 or m < 1:
        raise ValueError(f"need n >= 0 and m >= 1, got ({n}, {m})")
    spec = biortho_coefficients(f, max(n, m, 1), tol).truncated(n, m)
    return spectrum_function(spec, f"S_{n},{m}[{getattr(f, 'name', '')}]")


def projector_norm_scan(
    corpus: Sequence, w: Weight, p: float, orders: Sequence[tuple[int, int]], tol: float = COEFF_TOL
) -> list[float]:
    """For each ``(n, m)``, the sup over the corpus of ``||S_nm f|| / ||f||`` in L^p_nu."""
    if not corpus:
        raise EmptyCorpus("projector_norm_scan needs at least one function")
    top = max(max(n, m) for n, m in orders)
    spectra = [biortho_coefficients(f, max(top, 1), tol) for f in corpus]
    norms = [weighted_lp_norm_J(f, w, p) for f in corpus]
    out = []
    for n, m in orders:
        if n < 0 or m < 1:
            raise ValueError(f"need n >= 0 and m >= 1, got ({n}, {m})")
        best = 0.0
        for spec, nf in zip(spectra, norms):
            if nf == 0.0:
                continue
            g = spectrum_function(spec.truncated(n, m))
            best = max(best, weighted_lp_norm_J(g, w, p) / nf)
        out.append(best)
    return out


def fourier_coefficients(f, N: int, tol: float = COEFF_TOL) -> FourierSpectrum:
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(0, N + 1, dtype=float)

    def integrand(x):
        fx = f(x)
        nx = n.reshape((-1,) + (1,) * x.ndim) * x
        return np.concatenate([fx * np.cos(nx), fx * np.sin(nx[1:])])

    vals = np.asarray(integrate(integrand, (0.0, TWO_PI), tol))
    return FourierSpectrum(vals[: N + 1], vals[N + 1 :])


def dual_coefficients_via_fourier(f, N: int, tol: float = COEFF_TOL) -> BiorthoSpectrum:
    """Dual pairings rebuilt from raw Fourier integrals of ``g = (2pi - x) f / pi^2`` and ``f``."""
    g = lambda x: (TWO_PI - x) * f(x) / PI2  # noqa: E731
    G = fourier_coefficients(g, N, tol)
    F = fourier_coefficients(f, N, tol)
    return BiorthoSpectrum(0.5 * G.c[0], G.c[1:], F.s / PI2, getattr(f, "name", ""))


def _seq_norm(fs: FourierSpectrum, r: float) -> float:
    terms = np.concatenate([[abs(fs.c[0])], np.abs(fs.c[1:]), np.abs(fs.s)])
    return float(np.sum(terms**r) ** (1.0 / r))


def lp_norm_J(f, p: float, tol: float = 1e-12) -> float:
    return float(integrate(lambda x: np.abs(f(x)) ** p, (0.0, TWO_PI), tol, rtol=1e-12)) ** (1.0 / p)


def young_hausdorff_ratio(f, p: float, N: int, tol: float = COEFF_TOL) -> tuple[float, float]:
    """``(l^{p'} norm of the raw Fourier coefficients, ||f||_{L^p(J)})``."""
    if not 1 < p <= 2:
        raise ValueError(f"Young-Hausdorff needs p in (1, 2], got {p}")
    pc = p / (p - 1.0)
    return _seq_norm(fourier_coefficients(f, N, tol), pc), lp_norm_J(f, p)


def young_hausdorff_converse(f, p: float, N: int, tol: float = COEFF_TOL) -> tuple[float, float]:
    """``(||f||_{L^{p'}(J)}, l^p norm of the raw Fourier coefficients)``."""
    if not 1 < p <= 2:
        raise ValueError(f"Young-Hausdorff needs p in (1, 2], got {p}")
    pc = p / (p - 1.0)
    return lp_norm_J(f, pc), _seq_norm(fourier_coefficients(f, N, tol), p)


def safe_ratio(num: float, den: float) -> Optional[float]:
    return None if den == 0.0 else num / den


def parseval_defect(f, N: int, tol: float = COEFF_TOL) -> float:
    """``| ||f||^2 - (c0^2 / 2pi + sum(c_n^2 + s_n^2) / pi) |`` in L^2(J)."""
    fs = fourier_coefficients(f, N, tol)
    rhs = fs.c[0] ** 2 / TWO_PI + (np.sum(fs.c[1:] ** 2) + np.sum(fs.s**2)) / math.pi
    lhs = float(integrate(lambda x: f(x) ** 2, (0.0, TWO_PI), tol))
    return abs(lhs - rhs)


def coeff_decay_bound(spec: BiorthoSpectrum, start: int = 1, floor: float = 0.0) -> float:
    """Smallest ``c`` with ``|ac[n]|, |as[n]| <= c / n^2`` for computed ``n >= start``.

    Entries with magnitude ``<= floor`` are treated as zero.
    """
    if spec.N == 0 or start > spec.N:
        return 0.0
    n = np.arange(1, spec.N + 1, dtype=float)
    mag = np.maximum(np.abs(spec.ac), np.abs(spec.as_))
    mag = np.where(mag <= floor, 0.0, mag)
    return float(np.max((n**2 * mag)[start - 1 :]))
