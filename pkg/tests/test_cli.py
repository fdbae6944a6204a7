import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hypervolt.cli import Grid, main, parse_grid
from hypervolt.errors import ValidationError
from hypervolt.profiles import CATALOG


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("0.1:5:20", Grid(0.1, 5.0, 20, "geometric")),
        ("1:2:3:linear", Grid(1.0, 2.0, 3, "linear")),
        ("1:1:1", Grid(1.0, 1.0, 1, "geometric")),
    ],
)
def test_parse_grid(text, expected):
    assert parse_grid(text) == expected


@pytest.mark.parametrize("text", ["1:2", "a:2:3", "0:1:5", "1:2:1", "2:1:5", "1:2:3:log", "1:2:1.5", "-1:2:3"])
def test_parse_grid_rejects(text):
    with pytest.raises(ValidationError):
        parse_grid(text)


def test_grid_times():
    assert np.allclose(Grid(1.0, 100.0, 3).times(), [1.0, 10.0, 100.0])
    assert np.allclose(Grid(1.0, 3.0, 3, "linear").times(), [1.0, 2.0, 3.0])
    assert Grid(2.0, 2.0, 1).times().tolist() == [2.0]


def test_solve_all_routes_lambda_one(capsys):
    code, out, _ = run(capsys, "solve", "--lambda", "1", "--grid", "1:1:1", "--route", "all")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["t", "value", "route", "err_est"]
    assert [r["route"] for r in rows] == ["inversion", "resolvent", "direct"]
    for r in rows:
        assert float(r["value"]) == pytest.approx(math.cosh(1.0), rel=1e-5)


def test_solve_hyper_routes(capsys):
    code, out, _ = run(capsys, "solve", "--lambda", "-0.25", "--grid", "0.5:2:3")
    assert code == 0
    rows = table(out)
    assert {r["route"] for r in rows} == {"inversion", "resolvent"}
    by = {(r["route"], r["t"]): float(r["value"]) for r in rows}
    for t in ("0.5", "1.0", "2.0"):
        assert by[("inversion", t)] == pytest.approx(by[("resolvent", t)], rel=1e-8)


def test_csv_round_trips_floats(capsys):
    _, out, _ = run(capsys, "solve", "--lambda", "0.5", "--route", "inversion", "--grid", "0.3:3:4")
    _, js, _ = run(capsys, "solve", "--lambda", "0.5", "--route", "inversion", "--grid", "0.3:3:4", "--format", "json")
    csv_rows = table(out)
    json_rows = json.loads(js)["rows"]
    assert len(csv_rows) == len(json_rows) == 4
    for c, j in zip(csv_rows, json_rows):
        assert float(c["t"]) == j["t"]
        assert float(c["value"]) == j["value"]  # shortest repr: exact round trip
        assert c["route"] == j["route"]


def test_out_file(tmp_path, capsys):
    path = tmp_path / "v.csv"
    code, out, _ = run(capsys, "solve", "--lambda", "1", "--grid", "1:2:2", "--route", "resolvent", "--out", str(path))
    assert code == 0 and out == ""
    rows = table(path.read_text())
    assert float(rows[1]["value"]) == pytest.approx(math.cosh(2.0), rel=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--lambda", "-1"],
        ["solve", "--lambda", "0", "--grid", "1:2:2"],
        ["solve", "--lambda", "0.5", "--profile", "no-such-profile"],
        ["solve", "--lambda", "0.5", "--grid", "5:1:3"],
        ["solve", "--lambda", "-0.5", "--route", "resolvent", "--grid", "1:2:2"],
        ["solve", "--lambda", "0.5", "--route", "direct", "--grid", "1:1000:2"],
        ["solve", "--lambda", "0.5", "--nodes", "20", "--grid", "1:2:2"],
        ["compare", "--lambda", "0.5", "--route", "inversion", "--grid", "1:2:2"],
    ],
)
def test_invalid_input_exits_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_invalid_thread_setting_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("HYPERVOLT_THREADS", "zero")
    code, _, err = run(capsys, "solve", "--lambda", "0.5", "--route", "inversion", "--grid", "1:2:2")
    assert code == 2
    assert "HYPERVOLT_THREADS" in err


def test_numerical_failure_exits_3(capsys):
    # Mittag-Leffler argument beyond its usable range
    code, out, err = run(capsys, "solve", "--lambda", "0.5", "--route", "resolvent", "--grid", "50:60:2")
    assert code == 3
    assert out == ""
    assert "numerical failure" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--lambda", "1", "--route", "bogus"])
    assert exc.value.code == 2


def test_verify_residuals_small(capsys):
    code, out, _ = run(capsys, "verify", "--lambda", "-0.25")
    assert code == 0
    rows = table(out)
    assert [float(r["t"]) for r in rows] == pytest.approx([0.5, 0.5 * 40 ** (1 / 3), 0.5 * 40 ** (2 / 3), 20.0])
    for r in rows:
        assert float(r["scaled_residual"]) <= 1e-8
        assert r["regularization"] == "subtraction-at-t"
        assert r["route"] == "inversion"


def test_verify_resolvent_route(capsys):
    code, out, _ = run(capsys, "verify", "--lambda", "-0.25", "--route", "resolvent", "--grid", "1:1:1")
    assert code == 0
    assert float(table(out)[0]["scaled_residual"]) <= 1e-8


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--lambda", "0.5", "--grid", "0.1:2:6")
    assert code == 0
    rows = table(out)
    assert [r["pair"] for r in rows] == ["inversion-resolvent", "inversion-direct", "resolvent-direct"]
    assert float(rows[0]["max_rel"]) <= 1e-8
    assert all(float(r["max_rel"]) <= 1e-3 for r in rows)
    assert all(r["points"] == "6" for r in rows)


def test_asym_report(capsys):
    code, out, err = run(capsys, "asym")
    assert code == 0
    rows = {r["regime"]: r for r in table(out)}
    small, large = rows["small-t"], rows["large-t"]
    assert float(small["stated_exponent"]) == -0.25
    assert float(small["predicted_exponent"]) == 0.25
    assert abs(float(small["exponent"]) - 0.25) < 0.02
    assert small["less_singular_than_kernel"] == "true"
    assert float(large["predicted_exponent"]) == -1.25
    assert math.isnan(float(large["stated_exponent"]))
    assert "t^(-1/4)" in err


def test_asym_json_notes(capsys):
    code, out, err = run(capsys, "asym", "--format", "json", "--points", "8")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert "t^(-1/4)" in doc["notes"][0]
    large = [r for r in doc["rows"] if r["regime"] == "large-t"][0]
    assert large["stated_exponent"] is None


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    rows = table(out)
    assert [r["name"] for r in rows] == list(CATALOG)
    assert {r["contour_safe"] for r in rows} <= {"true", "false"}


def test_sample_file_profile(tmp_path, capsys):
    path = tmp_path / "decay.csv"
    t = np.linspace(0.0, 40.0, 4001)
    v = np.exp(-t)
    v[-1] = 0.0
    lines = ["t,v0"] + [f"{float(x)!r},{float(y)!r}" for x, y in zip(t, v)]
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "solve", "--lambda", "1", "--profile", str(path), "--grid", "1:1:1", "--route", "resolvent")
    assert code == 0
    # piecewise-linear exp(-t) with spacing 0.01
    assert float(table(out)[0]["value"]) == pytest.approx(math.cosh(1.0), rel=1e-4)


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "hypervolt", *argv], capture_output=True)


def test_module_entry_point_and_determinism():
    argv = ("solve", "--lambda", "-0.25", "--grid", "0.1:10:5", "--format", "json")
    first, second = _cli(*argv), _cli(*argv)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert len(json.loads(first.stdout)["rows"]) == 10


def test_module_entry_point_exit_code():
    assert _cli("solve", "--lambda", "-1").returncode == 2
