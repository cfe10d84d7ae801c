import json

import pytest

from symgeo.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTables:
    def test_octonionic_rows(self, capsys, tmp_path):
        out_file = tmp_path / "tables.json"
        code, _, _ = run_cli(capsys, "tables", "--family", "H2O",
                             "--out", str(out_file))
        assert code == 0
        doc = json.loads(out_file.read_text())
        mult = doc["multiplicities"][0]
        assert (mult["m_alpha"], mult["m_2alpha"]) == (8, 7)
        kappa14 = [r for r in doc["kappa"] if r["k_or_d"] == 14][0]
        assert kappa14["value"] == "18"
        cx2 = [r for r in doc["cx"] if r["k_or_d"] == 2][0]
        assert cx2["value"] == "18"

    def test_real_family_column(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--family", "HnR", "--n", "3")
        assert code == 0
        doc = json.loads(out)
        assert all(
            int(r["value"]) == r["k_or_d"] - 1 for r in doc["kappa"]
        )

    def test_bad_family_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["tables", "--family", "E8"])
        assert err.value.code == 2

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--family", "H2O",
                               "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "table,family,n,k_or_d,value,provenance"

    def test_k_and_d_filters(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "--family", "H2O",
                               "--k", "14", "--d", "2")
        assert code == 0
        doc = json.loads(out)
        assert [r["value"] for r in doc["kappa"]] == ["18"]
        assert [r["value"] for r in doc["cx"]] == ["18"]

    def test_byte_identical_reruns(self, capsys, tmp_path):
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, "tables", "--family", "HnH", "--out", str(f1))
        run_cli(capsys, "tables", "--family", "HnH", "--out", str(f2))
        assert f1.read_bytes() == f2.read_bytes()


class TestRx:
    def test_octonionic(self, capsys):
        code, out, _ = run_cli(capsys, "rx", "H2O")
        assert code == 0
        doc = json.loads(out)
        assert doc["r_lower_bound"] == 2
        assert doc["tau_profile"][2]["inside"] is True
        assert doc["tau_profile"][3]["inside"] is False

    def test_sl16(self, capsys):
        code, out, _ = run_cli(capsys, "rx", "SL:16")
        assert code == 0
        doc = json.loads(out)
        assert doc["r_lower_bound"] >= doc["closed_form_bound"] == 1

    def test_sl2_rejected(self, capsys):
        code, _, err = run_cli(capsys, "rx", "SL:2")
        assert code == 2
        assert "rank one" in err

    def test_unknown_target(self, capsys):
        code, _, _ = run_cli(capsys, "rx", "E8")
        assert code == 2


class TestVerify:
    def test_hessian_suite(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "hessian", "--n", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["pass"] is True
        assert len(doc["checks"]) == 4

    def test_monotonicity_suite(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "monotonicity")
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_spherical_suite_small(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "spherical",
                               "--samples", "20000", "--seed", "5")
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_ff_suite_small(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "ff", "--chains", "5")
        assert code == 0
        doc = json.loads(out)
        assert doc["pass"] is True
        suite = doc["checks"][1]
        assert suite["detail"]["c_empirical"] <= 20.0

    def test_deterministic_output(self, capsys, tmp_path):
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, "verify", "ff", "--chains", "3", "--out", str(f1))
        run_cli(capsys, "verify", "ff", "--chains", "3", "--out", str(f2))
        assert f1.read_bytes() == f2.read_bytes()


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--help"])
    assert err.value.code == 0
