import csv
import io
import json
import math

import pytest

from hotspots import cli
from hotspots.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_constant_d2(capsys):
    rep = run_json(capsys, "constant", "-d", "2")
    assert rep["command"] == "constant"
    res = rep["results"]
    assert res["constant_star"] == pytest.approx(58.355, abs=1e-3)
    assert res["constant_ceiling"] == math.ceil(res["constant_star"])
    assert res["constant_ceiling"] <= 60
    assert set(res) >= {"d", "alpha_d", "p_sq", "j_first", "M", "alpha_star", "constant_star", "constant_ceiling"}
    assert rep["versions"]["hotspots"]


def test_constant_d3_ceiling(capsys):
    assert run_json(capsys, "constant", "-d", "3")["results"]["constant_ceiling"] == 23


def test_constant_general_mode(capsys):
    res = run_json(capsys, "constant", "-d", "2", "--beta", "0.99", "--M", "10.65")["results"]
    assert math.isfinite(res["constant_star"])
    assert res["beta"] == 0.99 and res["M"] == 10.65


def test_table_rows_and_monotone(capsys):
    rows = run_json(capsys, "table", "--dmin", "2", "--dmax", "4")["results"]["rows"]
    assert [r["d"] for r in rows] == [2, 3, 4]
    assert [r["constant_star"] for r in rows] == pytest.approx([58.35, 22.04, 14.71], abs=0.01)


def test_table_agrees_with_constant(capsys):
    row = run_json(capsys, "table", "--dmin", "2", "--dmax", "2")["results"]["rows"][0]
    single = run_json(capsys, "constant", "-d", "2")["results"]
    for key, value in row.items():
        assert single[key] == value


def test_table_large_dimensions(capsys):
    rows = run_json(capsys, "table", "--dmin", "100", "--dmax", "200")["results"]["rows"]
    values = [r["constant_star"] for r in rows]
    assert all(3.8 < v < 6.0 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_table_csv(capsys):
    code, out, _ = run(capsys, "--csv", "table", "--dmin", "2", "--dmax", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["d"]) for r in rows] == [2, 3]
    assert float(rows[0]["constant_star"]) == pytest.approx(58.355, abs=1e-3)


def test_global_flags_after_subcommand(capsys):
    code, out, _ = run(capsys, "table", "--dmin", "2", "--dmax", "2", "--csv")
    assert code == 0 and out.startswith("d,")


def test_json_round_trip_inputs(capsys):
    argv = ["constant", "-d", "4", "--beta", "0.3", "--M", "11.75"]
    rep = run_json(capsys, *argv)
    again = json.loads(json.dumps(rep))
    assert again == rep
    assert rep["inputs"] == {"d": 4, "beta": 0.3, "M": 11.75}


def test_emitted_precision(capsys):
    res = run_json(capsys, "constant", "-d", "2")["results"]
    for key in ("alpha_d", "p_sq", "M", "alpha_star", "constant_star"):
        assert len(repr(res[key]).replace(".", "").lstrip("0")) <= 12


@pytest.mark.parametrize(
    "argv",
    [
        ["constant", "-d", "1"],
        ["constant", "-d", "2", "--beta", "0.5"],
        ["constant", "-d", "2", "--beta", "1.2", "--M", "3"],
        ["constant", "-d", "two"],
        ["table", "--dmin", "5", "--dmax", "3"],
        ["verify", "--gen", "disk:1"],
        ["verify", "--gen", "disk:1", "--h", "0.5"],
        ["verify", "--gen", "blob:1", "--h", "0.1"],
        ["verify", "--h", "0.1"],
        ["mc", "--gen", "disk:1", "--h", "0.05", "--paths", "10"],
        ["survival", "--gen", "disk:1", "--h", "0.05", "--t", "0.1", "--x0", "0,0"],
        ["--threads", "0", "table", "--dmin", "2", "--dmax", "2"],
        ["nonsense"],
    ],
)
def test_invalid_input_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert json.loads(err)["exit_code"] == 1


def test_malformed_mask_file_exit_1(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("hotspots-mask v1\nh 0.1\n" + "#" * 12 + "\n" + "#" * 11 + "\n")
    code, _, err = run(capsys, "verify", "--domain", str(path))
    assert code == 1
    assert "line 4" in json.loads(err)["message"]


def test_numerical_failure_exit_2(capsys):
    code, out, err = run(capsys, "constant", "-d", "2", "--beta", "0.999999", "--M", "1000")
    assert code == 2
    assert json.loads(err)["error"] == "NumericalFailure"


def test_invariant_violation_exit_3(capsys, monkeypatch):
    # a negative tolerance turns the satisfied survival inequality into a failure
    monkeypatch.setattr(cli, "LEMMA1_TOL", -100.0)
    code, out, err = run(capsys, "verify", "--gen", "rectangle:2,1", "--h", "0.0625", "--t-grid", "0.1")
    assert code == 3
    rep = json.loads(out)
    assert rep["results"]["checks"]["lemma1_slack_ok"] is False
    assert json.loads(err)["exit_code"] == 3


def test_verify_rectangle(capsys):
    rep = run_json(capsys, "verify", "--gen", "rectangle:2,1", "--h", "0.03125", "--t-grid", "0.01,0.1")
    res = rep["results"]
    assert res["hot_spots"]["ratio"] == 1.0
    assert all(res["checks"].values())
    assert [r["t"] for r in res["rows"]] == [0.01, 0.1]
    assert rep["inputs"]["t_grid"] == [0.01, 0.1]


def test_verify_disk_eigenvalues(capsys):
    res = run_json(capsys, "verify", "--gen", "disk:1", "--h", "0.0078125", "--t-grid", "0.1")["results"]
    assert res["hot_spots"]["mu1"] == pytest.approx(3.390, rel=1e-2)
    assert res["hot_spots"]["lambda1"] == pytest.approx(5.783, rel=1e-2)


def test_verify_dumbbell_reports_ratio(capsys):
    res = run_json(capsys, "verify", "--gen", "dumbbell:1,0.1,0.5,0.25", "--h", "0.03125", "--t-grid", "0.1")["results"]
    assert res["hot_spots"]["ratio"] >= 1.0
    assert res["checks"]["bound_satisfied"]


def test_gen_then_domain_file(capsys, tmp_path):
    path = tmp_path / "annulus.txt"
    rep = run_json(capsys, "gen", "--gen", "annulus:0.5,1", "--h", "0.0625", "-o", str(path))
    assert path.read_text().startswith("hotspots-mask v1\n")
    from_file = run_json(capsys, "survival", "--domain", str(path), "--t", "0.01", "--x0", "16,4")["results"]
    from_gen = run_json(capsys, "survival", "--gen", "annulus:0.5,1", "--h", "0.0625", "--t", "0.01", "--x0", "16,4")["results"]
    assert from_file["survival"] == from_gen["survival"]
    assert from_file["domain"]["cells"] == rep["results"]["domain"]["cells"]


def test_gen_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "--gen", "rectangle:1,1", "--h", "0.1")
    assert code == 0
    assert out.splitlines()[:3] == ["hotspots-mask v1", "h 0.1", "#" * 10]


def test_survival_pde_and_mc_agree(capsys):
    common = ["--gen", "rectangle:1,1", "--h", "0.0625", "--t", "0.05"]
    pde = run_json(capsys, "survival", *common)["results"]
    mc = run_json(capsys, "--seed", "4", "survival", *common, "--method", "mc", "--paths", "20000", "--dt", "1e-5")["results"]
    assert mc["method"] == "monte_carlo"
    assert abs(mc["survival"] - pde["survival"]) <= max(3 * mc["error_estimate"], 0.02 * pde["survival"])


def test_mc_deterministic_across_threads(capsys):
    argv = ["mc", "--gen", "rectangle:2,1", "--h", "0.0625", "--paths", "20000", "--t", "0.1"]
    one = run_json(capsys, "--seed", "17", *argv)
    four = run_json(capsys, "--seed", "17", "--threads", "4", *argv)
    assert one["results"] == four["results"]
    assert one["results"]["checks"]["lemma1_slack_ok"]
    assert one["results"]["walk"]["seed"] == 17
