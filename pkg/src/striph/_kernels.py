"""Hot inner loops: series field evaluation and interval-family scans.

Each kernel exists twice, as a numba ``@njit`` function and as a pure-numpy
fallback.  Both accumulate in the same fixed order (modes low-n to high-n,
interval lengths short to long), so their results agree to a few ulps and
each backend is bit-for-bit reproducible.

Mode factors ``cos nx``, ``sin nx`` and ``e^{-ny}`` come from the
angle-addition recurrence and repeated multiplication, so only three
transcendental calls are made per point; the recurrence error grows like
``n * eps``.

Backend selection: ``STRIPH_BACKEND=numba|numpy`` (default ``numba`` when it
imports).  ``STRIPH_THREADS`` caps the numba thread pool.
"""
from __future__ import annotations

import logging
import math
import os

import numpy as np

log = logging.getLogger(__name__)

try:
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_BACKENDS = ("numba", "numpy")


def _initial_backend() -> str:
    want = os.environ.get("STRIPH_BACKEND", "numba" if HAS_NUMBA else "numpy").strip().lower()
    if want not in _BACKENDS:
        raise ValueError(f"STRIPH_BACKEND must be one of {_BACKENDS}, got {want!r}")
    if want == "numba" and not HAS_NUMBA:
        log.warning("STRIPH_BACKEND=numba requested but numba is not importable; using numpy")
        return "numpy"
    return want


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    name = name.lower()
    if name not in _BACKENDS:
        raise ValueError(f"backend must be one of {_BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not available")
    _backend = name


def _apply_thread_cap() -> None:
    raw = os.environ.get("STRIPH_THREADS")
    if not raw or not HAS_NUMBA:
        return
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer STRIPH_THREADS=%r", raw)
        return
    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


_apply_thread_cap()


# ---------------------------------------------------------------- series


def _series_numpy(a0c, ac, as_, lam, x, y, nderiv):
    out = np.zeros((6, x.size))
    out[0] = a0c
    c1, s1, e1 = np.cos(x), np.sin(x), np.exp(-y)
    c, s, e = np.ones_like(x), np.zeros_like(x), np.ones_like(x)
    for j in range(ac.size):
        n = j + 1.0
        c, s = c * c1 - s * s1, s * c1 + c * s1
        e = e * e1
        coef = ac[j] + lam * y * as_[j]
        A = coef * e
        B = as_[j] * e
        out[0] += A * c + B * x * s
        if nderiv >= 1:
            Ap = (lam * as_[j] - n * coef) * e
            out[1] += -n * A * s + B * (s + n * x * c)
            out[2] += Ap * c - n * B * x * s
        if nderiv >= 2:
            App = (-2.0 * n * lam * as_[j] + n * n * coef) * e
            out[3] += -n * n * A * c + B * (2.0 * n * c - n * n * x * s)
            out[4] += -n * Ap * s - n * B * (s + n * x * c)
            out[5] += App * c + n * n * B * x * s
    return out


def _scan_ap_numpy(cn, cs, h, pm1, max_len):
    R = cn.size
    lengths = np.arange(1, max_len + 1) * h
    best = np.empty(R)
    for i in range(R):
        idx = (i + np.arange(max_len)) % R
        sn = np.cumsum(cn[idx])
        ss = np.cumsum(cs[idx])
        best[i] = np.max((sn / lengths) * (ss / lengths) ** pm1)
    return best


def _scan_rh_numpy(cn, cq, h, inv_exp, max_len):
    R = cn.size
    lengths = np.arange(1, max_len + 1) * h
    best = np.empty(R)
    for i in range(R):
        idx = (i + np.arange(max_len)) % R
        sn = np.cumsum(cn[idx])
        sq = np.cumsum(cq[idx])
        best[i] = np.max((sq / lengths) ** inv_exp / (sn / lengths))
    return best


if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _series_numba(a0c, ac, as_, lam, x, y, nderiv):
        npts = x.size
        out = np.zeros((6, npts))
        for k in prange(npts):
            xk = x[k]
            yk = y[k]
            c1 = math.cos(xk)
            s1 = math.sin(xk)
            e1 = math.exp(-yk)
            c = 1.0
            s = 0.0
            e = 1.0
            u = a0c
            ux = 0.0
            uy = 0.0
            uxx = 0.0
            uxy = 0.0
            uyy = 0.0
            for j in range(ac.size):
                n = j + 1.0
                c, s = c * c1 - s * s1, s * c1 + c * s1
                e = e * e1
                coef = ac[j] + lam * yk * as_[j]
                A = coef * e
                B = as_[j] * e
                u += A * c + B * xk * s
                if nderiv >= 1:
                    Ap = (lam * as_[j] - n * coef) * e
                    ux += -n * A * s + B * (s + n * xk * c)
                    uy += Ap * c - n * B * xk * s
                if nderiv >= 2:
                    App = (-2.0 * n * lam * as_[j] + n * n * coef) * e
                    uxx += -n * n * A * c + B * (2.0 * n * c - n * n * xk * s)
                    uxy += -n * Ap * s - n * B * (s + n * xk * c)
                    uyy += App * c + n * n * B * xk * s
            out[0, k] = u
            out[1, k] = ux
            out[2, k] = uy
            out[3, k] = uxx
            out[4, k] = uxy
            out[5, k] = uyy
        return out

    @njit(parallel=True, cache=True)
    def _scan_ap_numba(cn, cs, h, pm1, max_len):
        R = cn.size
        best = np.empty(R)
        for i in prange(R):
            sn = 0.0
            ss = 0.0
            b = -1.0
            for L in range(1, max_len + 1):
                j = (i + L - 1) % R
                sn += cn[j]
                ss += cs[j]
                ln = L * h
                v = (sn / ln) * (ss / ln) ** pm1
                if v > b:
                    b = v
            best[i] = b
        return best

    @njit(parallel=True, cache=True)
    def _scan_rh_numba(cn, cq, h, inv_exp, max_len):
        R = cn.size
        best = np.empty(R)
        for i in prange(R):
            sn = 0.0
            sq = 0.0
            b = -1.0
            for L in range(1, max_len + 1):
                j = (i + L - 1) % R
                sn += cn[j]
                sq += cq[j]
                ln = L * h
                v = (sq / ln) ** inv_exp / (sn / ln)
                if v > b:
                    b = v
            best[i] = b
        return best


def series_fields(a0c, ac, as_, lam, x, y, nderiv=2, backend=None):
    """Evaluate the truncated strip series and its derivatives.

    Returns an array of shape ``(6,) + broadcast(x, y).shape`` holding
    ``u, ux, uy, uxx, uxy, uyy`` (rows above ``nderiv`` are zero).
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf = np.ascontiguousarray(x.ravel())
    yf = np.ascontiguousarray(y.ravel())
    ac = np.ascontiguousarray(ac, dtype=float)
    as_ = np.ascontiguousarray(as_, dtype=float)
    if (backend or _backend) == "numba":
        out = _series_numba(float(a0c), ac, as_, float(lam), xf, yf, int(nderiv))
    else:
        out = _series_numpy(float(a0c), ac, as_, float(lam), xf, yf, int(nderiv))
    return out.reshape((6,) + shape)


def scan_ap(cell_nu, cell_sigma, h, p, max_len=None, backend=None) -> float:
    """Sup of ``avg(nu) * avg(sigma)**(p-1)`` over runs of consecutive cells."""
    cn = np.ascontiguousarray(cell_nu, dtype=float)
    cs = np.ascontiguousarray(cell_sigma, dtype=float)
    max_len = cn.size if max_len is None else int(max_len)
    fn = _scan_ap_numba if (backend or _backend) == "numba" else _scan_ap_numpy
    return float(np.max(fn(cn, cs, float(h), float(p) - 1.0, max_len)))


def scan_rh(cell_nu, cell_pow, h, delta, max_len=None, backend=None) -> float:
    """Sup of ``avg(nu**(1+delta))**(1/(1+delta)) / avg(nu)`` over cell runs."""
    cn = np.ascontiguousarray(cell_nu, dtype=float)
    cq = np.ascontiguousarray(cell_pow, dtype=float)
    max_len = cn.size if max_len is None else int(max_len)
    fn = _scan_rh_numba if (backend or _backend) == "numba" else _scan_rh_numpy
    return float(np.max(fn(cn, cq, float(h), 1.0 / (1.0 + float(delta)), max_len)))
