"""Command-line front end: ``striph {solve,verify,weight,basis,yh}``.

Exit status: 0 when every internal contract held, 1 on a contract violation,
2 on a configuration error, 3 on a numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import basis, presets, solver, verification, weights
from .errors import ConfigError, Inconclusive, NumericalFailure, StriphError
from .io import load_sampled_function, write_csv, write_json
from .quadrature import ScalarFunction1D, make_uniform_grid2d

log = logging.getLogger("striph")

EXIT_OK, EXIT_CONTRACT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
GRAM_TOL = 1e-8
STRUCTURAL_TOL = 1e-12
WEAK_LIMIT = 1e-7
PARSEVAL_TOL = 1e-8
COMMANDS = ("solve", "verify", "weight", "basis", "yh")
_GRID_RE = re.compile(r"^(\d+)x(\d+)x([0-9.eE+-]+)$")


@dataclass
class RunConfig:
    command: str
    f_spec: str = "xsinx"
    weight_spec: str = "one"
    p: float = 2.0
    N: int = 64
    lambda_mode: Union[str, float] = "calibrated"
    grid: tuple[int, int, float] = (65, 65, 4.0)
    tol: float = 1e-10
    resolution: int = 256
    p_grid: tuple[float, ...] = (1.25, 1.5, 2.0)
    corpus: str = "band"
    out_dir: Path = field(default_factory=lambda: Path("striph_out"))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ConfigError(f"p must lie in (1, inf), got {self.p}")
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        nx, ny, xi = self.grid
        if nx < 3 or ny < 3 or not xi > 0:
            raise ConfigError(f"grid needs n_x, n_y >= 3 and xi > 0, got {self.grid}")
        if isinstance(self.lambda_mode, str) and self.lambda_mode not in ("paper_half", "calibrated"):
            raise ConfigError(f"bad lambda mode {self.lambda_mode!r}")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if self.resolution < 4:
            raise ConfigError("resolution must be >= 4")
        if any(not 1 < q <= 2 for q in self.p_grid):
            raise ConfigError("Young-Hausdorff exponents must lie in (1, 2]")
        if self.corpus not in ("band", "smooth"):
            raise ConfigError("corpus must be 'band' or 'smooth'")


def parse_grid(text: str) -> tuple[int, int, float]:
    m = _GRID_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like 65x65x4, got {text!r}")
    return int(m.group(1)), int(m.group(2)), float(m.group(3))


def parse_lambda(text: str) -> Union[str, float]:
    if text in ("paper_half", "calibrated"):
        return text
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"lambda must be paper_half, calibrated or a number, got {text!r}") from None
    if not math.isfinite(val):
        raise argparse.ArgumentTypeError("lambda must be finite")
    return val


def parse_p_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent list {text!r}") from None


def resolve_boundary(spec: str) -> ScalarFunction1D:
    if spec in presets.BOUNDARY_PRESETS:
        return presets.get_boundary(spec)
    path = Path(spec)
    if path.suffix.lower() == ".csv" or path.exists():
        return load_sampled_function(path)
    raise ConfigError(f"unknown boundary datum {spec!r}")


def resolve_lambda(cfg: RunConfig) -> float:
    if cfg.lambda_mode == "paper_half":
        return solver.HALF_LAMBDA
    if cfg.lambda_mode == "calibrated":
        grid = make_uniform_grid2d(*cfg.grid)
        return solver.calibrate_lambda(presets.xsinx(), grid)
    return float(cfg.lambda_mode)


def _solve(cfg: RunConfig):
    f = resolve_boundary(cfg.f_spec)
    datum = solver.BoundaryDatum(f)
    lam = resolve_lambda(cfg)
    return datum, solver.solve(datum, cfg.N, lam)


def run_solve(cfg: RunConfig) -> int:
    _, sol = _solve(cfg)
    grid = make_uniform_grid2d(*cfg.grid)
    table = solver.field_table(sol, grid)
    doc = sol.to_dict()
    doc["grid"] = grid.describe()
    doc["tail_bound_y0"] = solver.tail_estimate(sol, 0.0)
    write_json(cfg.out_dir / "solution.json", doc)
    write_csv(cfg.out_dir / "field.csv", solver.FIELD_CSV_HEADER, table)

    ys = grid.y_grid.points
    br = verification.boundary_report(sol, ys, np.empty(0), weights.one_weight(), 2.0)
    ok = br.periodicity_max <= STRUCTURAL_TOL and br.ux_at_0_max <= STRUCTURAL_TOL
    log.info("solve: N=%d lambda=%g periodicity=%.2e ux(0,y)=%.2e", sol.N, sol.lam, br.periodicity_max, br.ux_at_0_max)
    return EXIT_OK if ok else EXIT_CONTRACT


def run_verify(cfg: RunConfig) -> int:
    datum, sol = _solve(cfg)
    w = weights.parse_weight(cfg.weight_spec)
    nx, _, xi = cfg.grid
    rep = verification.strong_solution_check(sol, w, cfg.p, xi, datum.f, n_grid=nx, tol=cfg.tol)
    write_json(cfg.out_dir / "report.json", rep.to_dict())
    ok = (
        rep.harmonic
        and rep.periodicity_max <= STRUCTURAL_TOL
        and rep.ux_at_0_max <= STRUCTURAL_TOL
        and max(rep.weak_residuals, default=0.0) <= WEAK_LIMIT
        and math.isfinite(rep.w2_norm)
    )
    log.info("verify: laplacian=%.2e weak=%.2e harmonic=%s", rep.laplacian_max, max(rep.weak_residuals, default=0.0), rep.harmonic)
    return EXIT_OK if ok else EXIT_CONTRACT


def run_weight(cfg: RunConfig) -> int:
    w = weights.parse_weight(cfg.weight_spec)
    rep = weights.muckenhoupt_constant(w, cfg.p, cfg.resolution)
    write_json(cfg.out_dir / "weight.json", rep.to_dict())
    log.info("weight %s: [nu]_%g = %.6g, in A_p: %s", w.name, cfg.p, rep.ap_constant, rep.in_ap)
    return EXIT_OK if rep.in_ap else EXIT_CONTRACT


def run_basis(cfg: RunConfig) -> int:
    G = basis.biortho_gram(cfg.N, cfg.tol)
    dev = float(np.max(np.abs(G - np.eye(G.shape[0]))))
    labels = [f"{i.kind}{i.n}" for i in basis.basis_order(cfg.N)]
    write_csv(cfg.out_dir / "gram.csv", labels, G)
    write_json(cfg.out_dir / "basis.json", {"N": cfg.N, "tol": cfg.tol, "max_deviation": dev, "order": labels})
    log.info("basis: N=%d max |G - I| = %.3e", cfg.N, dev)
    return EXIT_OK if dev <= GRAM_TOL else EXIT_CONTRACT


def run_yh(cfg: RunConfig) -> int:
    corpus = presets.band_limited_corpus() if cfg.corpus == "band" else presets.smooth_corpus()
    rows, names, ok = [], [], True
    for i, f in enumerate(corpus):
        defect = basis.parseval_defect(f, cfg.N)
        if cfg.corpus == "band" and defect > PARSEVAL_TOL:
            ok = False
        for q in cfg.p_grid:
            lhs, rhs = basis.young_hausdorff_ratio(f, q, cfg.N)
            ratio = basis.safe_ratio(lhs, rhs)
            if ratio is None or not math.isfinite(ratio):
                ok = False
            rows.append((i, q, lhs, rhs, math.nan if ratio is None else ratio, defect))
        names.append(f.name)
    write_csv(cfg.out_dir / "yh.csv", ("index", "p", "coeff_norm", "lp_norm", "ratio", "parseval_defect"), rows)
    sup = {q: max(r[4] for r in rows if r[1] == q) for q in cfg.p_grid}
    write_json(cfg.out_dir / "yh.json", {"corpus": names, "N": cfg.N, "sup_ratio": {str(q): v for q, v in sup.items()}})
    return EXIT_OK if ok else EXIT_CONTRACT


_RUNNERS = {"solve": run_solve, "verify": run_verify, "weight": run_weight, "basis": run_basis, "yh": run_yh}


def run(cfg: RunConfig) -> int:
    """Validate ``cfg``, execute it, and map failures onto exit codes."""
    try:
        cfg.validate()
        return _RUNNERS[cfg.command](cfg)
    except NumericalFailure as exc:
        log.error("numerical failure: %s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC
    except Inconclusive as exc:
        log.error("inconclusive: %s", exc)
        return EXIT_CONTRACT
    except (StriphError, ValueError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f", dest="f_spec", default="xsinx", help="boundary preset (xsinx, sinx, poly, zero) or CSV x,value")
    common.add_argument("--weight", dest="weight_spec", default="one", help="one, power:alpha=A, shifted:c=C or CSV x,nu")
    common.add_argument("--p", type=float, default=2.0)
    common.add_argument("--N", type=int, default=64)
    common.add_argument("--lambda", dest="lambda_mode", type=parse_lambda, default="calibrated",
                        help="paper_half, calibrated, or a number")
    common.add_argument("--grid", type=parse_grid, default=(65, 65, 4.0), help="NXxNYxXI, e.g. 65x65x4")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--resolution", type=int, default=256, help="cell count for the A_p scan")
    common.add_argument("--p-grid", dest="p_grid", type=parse_p_grid, default=(1.25, 1.5, 2.0))
    common.add_argument("--corpus", choices=("band", "smooth"), default="band")
    common.add_argument("--out", dest="out_dir", type=Path, default=Path("striph_out"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="striph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    opts = vars(args)
    opts.pop("verbose")
    return run(RunConfig(**opts))


if __name__ == "__main__":
    sys.exit(main())
