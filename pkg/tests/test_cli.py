import json
import math
import subprocess
import sys

import numpy as np
import pytest

from striph import cli, presets, solver
from striph.errors import ConfigError, MalformedCSV, NonMonotoneAbscissae
from striph.io import csv_text, dumps, fmt_float, load_sampled_function, write_json
from striph.quadrature import TWO_PI


def _read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


# ---------------------------------------------------------------- io


def test_fmt_float_is_lossless():
    for v in (0.1, 1.0 / 3.0, 2.0**-1074, 1e300, -0.0, 7.0):
        assert float(fmt_float(v)) == v
    assert fmt_float(7.0) == "7.0"
    assert fmt_float(1e-300) == "1e-300"


def test_dumps_is_valid_json_and_maps_nonfinite_to_null():
    doc = {"a": [1.0, 2, math.nan], "b": {"c": np.float64(0.5), "d": math.inf}, "e": "x", "f": None, "g": True}
    back = json.loads(dumps(doc))
    assert back == {"a": [1.0, 2, None], "b": {"c": 0.5, "d": None}, "e": "x", "f": None, "g": True}


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_csv_text_layout():
    assert csv_text(("a", "b"), [(1.0, 0.25)]) == "a,b\n1.0,0.25\n"


def test_write_json_leaves_no_temp_files(tmp_path):
    write_json(tmp_path / "sub" / "r.json", {"v": 1.5})
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["r.json"]


def _sample_csv(path, xs, vals, header="x,value"):
    path.write_text(header + "\n" + "".join(f"{fmt_float(x)},{fmt_float(v)}\n" for x, v in zip(xs, vals)))
    return path


def test_load_sampled_sine_matches_to_1e9(tmp_path):
    xs = np.linspace(0.0, TWO_PI, 1001)
    f = load_sampled_function(_sample_csv(tmp_path / "s.csv", xs, np.sin(xs)))
    t = np.linspace(0.0, TWO_PI, 20001)
    assert np.max(np.abs(f(t) - np.sin(t))) <= 1e-9
    assert np.max(np.abs(f.d1(t) - np.cos(t))) <= 1e-6
    assert f.smoothness == "C2"


def test_load_sampled_out_of_order(tmp_path):
    xs = np.array([0.0, 2.0, 1.0, 3.0, 4.0])
    with pytest.raises(NonMonotoneAbscissae):
        load_sampled_function(_sample_csv(tmp_path / "o.csv", xs, xs))


@pytest.mark.parametrize(
    "text",
    ["", "x,value\n", "x,y\n0,0\n1,1\n2,2\n3,3\n", "x,value\n0,0\n1,a\n2,2\n3,3\n", "x,value\n0,0,0\n"],
)
def test_load_sampled_malformed(tmp_path, text):
    path = tmp_path / "m.csv"
    path.write_text(text)
    with pytest.raises(MalformedCSV):
        load_sampled_function(path)


def test_load_sampled_range_checked(tmp_path):
    xs = np.linspace(0.0, 7.0, 10)
    with pytest.raises(MalformedCSV):
        load_sampled_function(_sample_csv(tmp_path / "r.csv", xs, xs))


# ---------------------------------------------------------------- config


def test_parse_grid():
    assert cli.parse_grid("65x33x4") == (65, 33, 4.0)
    assert cli.parse_grid("9x9x0.5") == (9, 9, 0.5)
    with pytest.raises(Exception):
        cli.parse_grid("65x65")


def test_parse_lambda():
    assert cli.parse_lambda("paper_half") == "paper_half"
    assert cli.parse_lambda("0.75") == 0.75
    with pytest.raises(Exception):
        cli.parse_lambda("half")
    with pytest.raises(Exception):
        cli.parse_lambda("nan")


@pytest.mark.parametrize(
    "kw",
    [{"p": 1.0}, {"p": math.inf}, {"N": 0}, {"grid": (2, 9, 1.0)}, {"grid": (9, 9, 0.0)}, {"tol": 0.0},
     {"p_grid": (2.5,)}, {"lambda_mode": "half"}],
)
def test_runconfig_rejects(kw):
    with pytest.raises(ConfigError):
        cli.RunConfig("solve", **kw).validate()


def test_resolve_lambda_modes():
    assert cli.resolve_lambda(cli.RunConfig("solve", lambda_mode="paper_half")) == 0.5
    assert cli.resolve_lambda(cli.RunConfig("solve", lambda_mode=0.25)) == 0.25
    assert cli.resolve_lambda(cli.RunConfig("solve")) == 1.0


def test_resolve_boundary_unknown():
    with pytest.raises(ConfigError):
        cli.resolve_boundary("cosx")


# ---------------------------------------------------------------- runs


def test_solve_trace_row_matches_datum(tmp_path):
    argv = ["solve", "--f", "xsinx", "--weight", "one", "--p", "2", "--N", "16", "--lambda", "calibrated",
            "--grid", "65x65x4", "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    header, rows = _read_csv(tmp_path / "field.csv")
    assert header == ["x", "y", "u", "ux", "uy", "uxx", "uyy"]
    bottom = rows[rows[:, 1] == 0.0]
    assert bottom.shape[0] == 65
    np.testing.assert_allclose(bottom[:, 2], bottom[:, 0] * np.sin(bottom[:, 0]), rtol=0, atol=1e-13)
    doc = json.loads((tmp_path / "solution.json").read_text())
    assert doc["lambda"] == 1.0 and doc["N"] == 16


def test_solution_json_round_trip_reproduces_field(tmp_path):
    assert cli.main(["solve", "--f", "sinx", "--N", "32", "--grid", "17x17x2", "--out", str(tmp_path)]) == 0
    sol = solver.StripSolution.from_dict(json.loads((tmp_path / "solution.json").read_text()))
    _, rows = _read_csv(tmp_path / "field.csv")
    F = sol.fields(rows[:, 0], rows[:, 1], 2)
    got = np.stack([F[0], F[1], F[2], F[3], F[5]], axis=1)
    np.testing.assert_allclose(got, rows[:, 2:], rtol=0, atol=1e-12)


def test_outputs_are_byte_identical(tmp_path):
    for sub in ("a", "b"):
        assert cli.main(["solve", "--f", "poly", "--N", "24", "--lambda", "1", "--grid", "9x9x1",
                         "--out", str(tmp_path / sub)]) == 0
        assert cli.main(["weight", "--weight", "power:alpha=0.5", "--resolution", "64",
                         "--out", str(tmp_path / sub)]) == 0
    for name in ("solution.json", "field.csv", "weight.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_basis_small(tmp_path):
    assert cli.main(["basis", "--N", "8", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "basis.json").read_text())
    assert doc["max_deviation"] <= 1e-8
    header, G = _read_csv(tmp_path / "gram.csv")
    assert G.shape == (17, 17) and header[0] == "C0"


def test_weight_divergent_exits_3(tmp_path):
    assert cli.main(["weight", "--weight", "power:alpha=-2", "--p", "2", "--out", str(tmp_path)]) == 3


def test_coarse_grid_calibration_is_inconclusive(tmp_path):
    # 9 nodes over the period cannot separate the two candidates by 10x
    assert cli.main(["solve", "--f", "poly", "--N", "24", "--grid", "9x9x1", "--out", str(tmp_path)]) == 1


def test_yh_band_corpus(tmp_path):
    assert cli.main(["yh", "--N", "16", "--out", str(tmp_path)]) == 0
    header, rows = _read_csv(tmp_path / "yh.csv")
    assert rows.shape == (18, 6)
    assert np.all(np.isfinite(rows[:, 4]))


def test_verify_writes_report(tmp_path):
    rc = cli.main(["verify", "--f", "xsinx", "--N", "8", "--grid", "17x17x1", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rc == 0 and rep["harmonic"] is True and rep["lambda_used"] == 1.0


@pytest.mark.parametrize(
    "argv",
    [["solve", "--p", "0.5"], ["solve", "--f", "nosuch"], ["bogus"], ["solve", "--grid", "1x1"],
     ["weight", "--weight", "power:beta=1"], ["solve", "--f", "missing.csv"]],
)
def test_config_errors_exit_2(tmp_path, argv):
    assert cli.main(argv + ["--out", str(tmp_path)] if argv[0] != "bogus" else argv) == 2


def test_boundary_not_vanishing_exits_2(tmp_path):
    xs = np.linspace(0.0, TWO_PI, 65)
    path = _sample_csv(tmp_path / "c.csv", xs, np.cos(xs))
    assert cli.main(["solve", "--f", str(path), "--out", str(tmp_path)]) == 2


def test_explicit_lambda_half_not_harmonic(tmp_path):
    rc = cli.main(["verify", "--f", "xsinx", "--N", "8", "--lambda", "0.5", "--grid", "17x17x1",
                   "--out", str(tmp_path)])
    assert rc == 1
    assert json.loads((tmp_path / "report.json").read_text())["harmonic"] is False


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "striph", "basis", "--N", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "gram.csv").exists()


def test_presets_vanish_at_ends():
    for name in presets.BOUNDARY_PRESETS:
        f = presets.get_boundary(name)
        assert np.max(np.abs(f(np.array([0.0, TWO_PI])))) <= 1e-12
