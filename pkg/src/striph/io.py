"""Deterministic JSON/CSV output and sampled-function input."""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import MalformedCSV
from .quadrature import TWO_PI, ScalarFunction1D
from .weights import read_xy_csv


def fmt_float(v: float) -> str:
    """17 significant digits, lowercase exponent, always recognisably a float."""
    s = format(float(v), ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _json(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k), indent, level)}: {_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_json(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _json(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with fixed float formatting; non-finite floats become ``null``."""
    return _json(obj, indent, 0) + "\n"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps(obj))


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt_float(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def _end_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Derivative at ``x[0]`` of the quartic through the first five samples."""
    k = min(5, x.size)
    coeffs = np.polyfit(x[:k] - x[0], y[:k], k - 1)
    return float(coeffs[-2])


def load_sampled_function(path) -> ScalarFunction1D:
    """Clamped cubic spline through a CSV with header ``x,value`` on [0, 2pi]."""
    xs, vs = read_xy_csv(path, "value")
    if xs[0] < -1e-12 or xs[-1] > TWO_PI + 1e-12:
        raise MalformedCSV(f"{path}: x must lie in [0, 2pi]")
    left = _end_slope(xs, vs)
    right = -_end_slope(-xs[::-1], vs[::-1])
    spl = CubicSpline(xs, vs, bc_type=((1, left), (1, right)))
    return ScalarFunction1D(spl, spl.derivative(1), spl.derivative(2), "C2", f"csv:{Path(path).name}")
