import json

import pytest

from pertseries.cli import main, parse_n_range, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_polys_text(capsys):
    code, out, _ = run(capsys, "polys", "-k", "2")
    assert code == 0 and out.strip() == "P_2(1) = -a + 1/2"


def test_polys_json(capsys):
    code, out, _ = run(capsys, "polys", "-k", "4", "--json")
    rec = json.loads(out)["polynomials"][0]
    assert rec["coeffs"] == ["5/32", "-11/8", "9/4", "-1"]


def test_polys_odd(capsys):
    code, out, _ = run(capsys, "polys", "-k", "3")
    assert code == 0 and "identically" in out


def test_polys_check_golden_low_orders(capsys):
    code, out, _ = run(capsys, "polys", "-k", "2,4,6,8", "--check-golden")
    assert code == 0 and out.count("match") == 4


def test_coeffs_csv_and_oracle(capsys):
    code, out, _ = run(capsys, "coeffs", "--family", "power", "--alpha", "0", "--n", "2", "--k-max", "2",
                       "--csv", "--oracle", "contour")
    rows = out.strip().splitlines()
    assert rows[0].startswith("n,k,re,im") and rows[3].startswith("2,2,0.13333")


def test_coeffs_json_round_trips(capsys, tmp_path):
    path = tmp_path / "c.json"
    assert main(["coeffs", "--family", "alternating", "--n", "3", "--k-max", "4", "--json", "--out", str(path)]) == 0
    from pertseries.numeric import TaylorCoefficients
    tc = TaylorCoefficients.from_json(path.read_text())
    assert abs(complex(tc[2]) - 58 / 35) < 1e-15


def test_radius_json_lines(capsys):
    code, out, _ = run(capsys, "radius", "--family", "block2", "--n", "1", "--json")
    rec = json.loads(out.splitlines()[0])
    assert code == 0 and abs(rec["value"] - 0.75) < 1e-9


def test_radius_fit_is_reported(capsys):
    code, out, _ = run(capsys, "radius", "--family", "block2", "--alpha", "1", "--n-range", "1:9:2", "--jobs", "2")
    assert code == 0 and "slope" in out and "target 0" in out


def test_verify_table_row_control(capsys):
    code, out, _ = run(capsys, "verify", "table", "--row", "2", "--interval", "0.4:0.6")
    assert code == 1 and "NOT certified" in out
    code, out, _ = run(capsys, "verify", "table", "--row", "2")
    assert code == 0


def test_verify_bound_block(capsys):
    code, out, _ = run(capsys, "verify", "bound", "--family", "block2", "--n", "1")
    assert code == 0 and "all satisfied" in out


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind=alternating\nalpha=0\nn=3\nk_max=2\n")
    code, out, _ = run(capsys, "coeffs", "--config", str(cfg))
    assert code == 0 and "1.657142857142857" in out


def test_families(capsys):
    code, out, _ = run(capsys, "families")
    assert code == 0 and "block2" in out


@pytest.mark.parametrize("argv", [["coeffs", "--n", "0"], ["radius", "--n-range", "5:2"], ["nope"],
                                  ["coeffs", "--family", "power", "--alpha", "3", "--n", "2"]])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_numeric_failure_exit_3(capsys, monkeypatch):
    import pertseries.numeric as num

    def boom(*a, **k):
        raise num.ContourConvergenceError("forced", 0, 1)

    monkeypatch.setattr(num, "contour_coefficient", boom)
    assert main(["coeffs", "--n", "3", "--k-max", "2", "--oracle", "contour"]) == 3


def test_range_parser():
    assert parse_n_range("2:10:4") == [2, 6, 10]
    with pytest.raises(UsageError):
        parse_n_range("3")
