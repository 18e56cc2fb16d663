"""CLI contract: headers, routing, exit codes, determinism, JSON encoding."""

import csv
import dataclasses
import json
import math

import pytest

from qbrownian.cli import EXIT_CODES, main, to_jsonable
from qbrownian.gaussian import GaussianState, MapParams
from qbrownian.kernel import kernel_derivatives
from qbrownian.params import OccupationModel, PhysicalParams
from qbrownian.positivity import theorem_check
from qbrownian.scenario import ScanPoint
from qbrownian.spectral import coefficients

from conftest import FIXTURE_PARAMS

P1 = FIXTURE_PARAMS["P1"]

GRID = ["--grid-start", "0.005", "--grid-stop", "0.02", "--grid-count", "2"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_kernel_csv(tmp_path):
    out = tmp_path / "kernel.csv"
    assert main(["kernel", *GRID, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["t", "A", "dA", "d2A", "R2", "one_minus_R2"]
    assert len(rows) == 3
    # cells are exact reprs of the library values
    A, dA, d2A = kernel_derivatives(0.005, P1)
    assert rows[1][0] == repr(0.005) and rows[1][1] == repr(A)
    assert b"\r" not in out.read_bytes()


def test_kernel_stdout_routing(capsys):
    assert main(["kernel", *GRID]) == 0
    got = capsys.readouterr().out
    assert got.startswith("t,A,dA,d2A,R2,one_minus_R2")
    assert len(got.strip().splitlines()) == 3


def test_coeffs_csv(tmp_path):
    out = tmp_path / "coeffs.csv"
    assert main(["coeffs", *GRID, "--model", "high_t", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["t", "X", "Xdot", "Y", "R2", "err_X", "err_Xdot", "err_Y"]
    for row in rows[1:]:
        vals = dict(zip(rows[0], map(float, row)))
        assert vals["X"] > 0.0 and vals["Y"] > 0.0
        assert vals["err_X"] <= 1e-6 * vals["X"]


def test_coeffs_model_precedence(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("model = uniform\ngrid_start = 0.2\n"
                       "grid_stop = 0.4\ngrid_count = 2\n")
    out_file = tmp_path / "file_model.csv"
    out_flag = tmp_path / "flag_model.csv"
    assert main(["coeffs", "--config", str(cfgfile), "--out", str(out_file)]) == 0
    assert main(["coeffs", "--config", str(cfgfile), "--model", "high_t",
                 "--out", str(out_flag)]) == 0
    x_file = _rows(out_file)[1][1]
    x_flag = _rows(out_flag)[1][1]
    assert x_file != x_flag
    want = coefficients(0.2, OccupationModel.UNIFORM, P1, 1e-8).X
    assert x_file == repr(want)


def test_moments_csv(tmp_path):
    out = tmp_path / "moments.csv"
    assert main(["moments", *GRID, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["t", "q2", "p2", "qp_sym", "det_check"]
    hbar = P1.hbar
    for row in rows[1:]:
        vals = dict(zip(rows[0], map(float, row)))
        # evolved ground state keeps the uncertainty functional above h^2/4
        assert vals["det_check"] >= 0.25 * hbar**2 * (1.0 - 1e-12)
        assert vals["q2"] > 0.0 and vals["p2"] > 0.0


def test_check_ndjson(tmp_path):
    out = tmp_path / "check.ndjson"
    assert main(["check", "--grid-start", "1e-7", "--grid-stop", "1e-6",
                 "--grid-count", "2", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 2
    for line in lines:
        rec = json.loads(line)
        assert rec["model"] == "high_t"
        assert set(rec) >= {"t", "model", "coefficients", "margins",
                            "qualified", "theorem", "theorem_skipped",
                            "corollary"}
        assert rec["qualified"] is True
        assert rec["theorem"]["passed"] is True
        assert rec["corollary"]["passes"] is False
        assert rec["margins"]["gap31"] < 0.0


def test_check_csv_flattening(tmp_path):
    out = tmp_path / "check.csv"
    assert main(["check", "--grid-start", "1e-7", "--grid-stop", "1e-6",
                 "--grid-count", "2", "--csv", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == [
        "t", "model", "X", "Xdot", "Y", "R2", "one_minus_R2",
        "cs_gap", "err_cs_gap", "gap31",
        "cond9_value", "cond9_err", "cond10_value", "cond10_err",
        "cond14_left", "cond14_left_err", "cond14_margin", "cond14_err",
        "qualified", "theorem_passed", "corollary_passes",
    ]
    assert rows[1][1] == "high_t"
    assert rows[1][-3] == "true" and rows[1][-1] == "false"


def test_asymptotics_long_csv(tmp_path):
    out = tmp_path / "asym.csv"
    assert main(["asymptotics", "--model", "high_t",
                 "--grid-start", "1e-5", "--grid-stop", "1e-4",
                 "--grid-count", "2", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["t", "quantity", "numeric", "leading", "ratio"]
    by_q = {}
    for row in rows[1:]:
        by_q.setdefault(row[1], []).append(float(row[4]))
    assert set(by_q) == {"X", "Xdot", "Y", "one_minus_R2", "gap31"}
    for name, ratios in by_q.items():
        assert all(abs(r - 1.0) < 0.25 for r in ratios), (name, ratios)


def test_scenario_artifacts_and_determinism(tmp_path):
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    argv = ["scenario", "--grid-start", "1e-7", "--grid-stop", "1e-4",
            "--grid-count", "6"]
    assert main([*argv, "--out", str(out1)]) == 0
    assert main([*argv, "--out", str(out2)]) == 0

    report = json.loads((out1 / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["config"]["alpha"] == 10.0
    assert report["config"]["violation_model"] == "high_t"
    res = report["result"]
    assert res["t_prime"] in res["t_grid"]
    assert res["theorem"]["passed"] is True
    assert res["theorem"]["cond9"]["passed"] is True
    assert res["uncertainty"]["violated"] is True
    assert res["corollary_uniform"]["passes"] is True
    assert len(res["scan"]) == 2 * 6

    margins = _rows(out1 / "margins.csv")
    assert margins[0] == [f.name for f in dataclasses.fields(ScanPoint)]
    assert len(margins) == 1 + 2 * 6

    plot = _rows(out1 / "plotdata.csv")
    assert plot[0] == ["t", "gap31_high_t", "gap31_uniform"]
    assert len(plot) == 1 + 6
    for row in plot[1:]:
        assert float(row[1]) < 0.0 < float(row[2])

    for name in ("report.json", "margins.csv", "plotdata.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_scenario_no_violation_exits_regime(tmp_path, capsys):
    rc = main(["scenario", "--violation-model", "uniform",
               "--grid-start", "1e-7", "--grid-stop", "1e-5",
               "--grid-count", "3", "--out", str(tmp_path / "x")])
    assert rc == EXIT_CODES["regime"] == 4
    err = capsys.readouterr().err
    assert err.startswith("error:") and "uniform" in err


@pytest.mark.parametrize("argv,code", [
    (["coeffs", "--T", "abc"], 2),            # unconvertible flag
    (["kernel", "--config", "/no/such.cfg"], 2),
    (["kernel", "--gamma", "5"], 4),           # alpha < 3*gamma
    (["asymptotics", "--model", "exact"], 3),  # no closed leading forms
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert capsys.readouterr().err.startswith("error:")


def test_exit_code_table():
    assert EXIT_CODES == {"ok": 0, "internal": 1, "config": 2,
                          "domain": 3, "regime": 4, "integration": 5}


def test_to_jsonable_encodings():
    assert to_jsonable(float("nan")) is None
    assert to_jsonable(float("inf")) is None
    assert to_jsonable(1.5 + 2.0j) == {"re": 1.5, "im": 2.0}
    assert to_jsonable(OccupationModel.UNIFORM) == "uniform"
    assert to_jsonable((1, 2.0)) == [1, 2.0]
    assert to_jsonable({"a": math.nan}) == {"a": None}

    # pure damping map fires the theorem at macroscopic scale
    rep = theorem_check(GaussianState(0.0, 0.0, 0.5, 0.5, 0.0),
                        MapParams(0.1, 0.0, 0.0, 0.5), 1.0, 1.0)
    enc = to_jsonable(rep)
    assert enc["passed"] is True
    assert list(enc)[-1] == "passed"  # injected after the dataclass fields
    assert enc["cond9"]["passed"] is True
    assert isinstance(enc["I_value"], float)
