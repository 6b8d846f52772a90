import json

import numpy as np
import pytest

from predframe.cli import load_series, main, write_series
from predframe.errors import SeriesParseError
from predframe.models import Series


def run_cli(*argv):
    return main(list(argv))


class TestLoadSeries:
    def test_direct_parse(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("t,x\n1,1.0\n2,0.5\n3,0.25\n")
        s = load_series(str(p))
        np.testing.assert_array_equal(s.values, [1.0, 0.5, 0.25])
        assert s.t0 == 1

    def test_gap_in_time_index_names_line(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("t,x\n1,1.0\n3,0.5\n")
        with pytest.raises(SeriesParseError) as err:
            load_series(str(p))
        assert err.value.line == 3

    def test_header_only(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("t,x\n")
        with pytest.raises(SeriesParseError, match="no observations"):
            load_series(str(p))

    def test_non_numeric_value(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("t,x\n1,1.0\n2,abc\n")
        with pytest.raises(SeriesParseError) as err:
            load_series(str(p))
        assert err.value.line == 3

    def test_missing_column(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("time,x\n1,1.0\n")
        with pytest.raises(SeriesParseError):
            load_series(str(p))

    def test_round_trip_is_lossless(self, tmp_path):
        rng = np.random.default_rng(0)
        s = Series(rng.standard_normal(50) * 1e-3, t0=7)
        p = tmp_path / "round.csv"
        write_series(s, str(p))
        back = load_series(str(p))
        np.testing.assert_array_equal(back.values, s.values)
        assert back.t0 == 7


class TestCommands:
    def test_simulate_deterministic_rows(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--model", "ar1", "--beta", "0.5", "--T", "100",
                "--seed", "7"]
        assert run_cli(*args, "--out", str(out1)) == 0
        assert run_cli(*args, "--out", str(out2)) == 0
        assert out1.read_text() == out2.read_text()
        assert len(out1.read_text().splitlines()) == 101  # header + 100 rows

    def test_estimate_hand_example(self, tmp_path, capsys):
        p = tmp_path / "s3.csv"
        p.write_text("t,x\n1,1.0\n2,0.5\n3,0.25\n")
        assert run_cli("estimate", "--model", "ar1", "--in", str(p)) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema_version"] == 1
        assert payload["theta_hat"]["beta"] == pytest.approx(0.5)
        assert payload["upsilon_hat"] == [[0.75]]

    def test_predict_payload(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        p.write_text("t,x\n1,1.0\n2,-1.0\n")
        assert run_cli("predict", "--model", "garch11", "--omega", "0.1",
                       "--alpha", "0.1", "--beta", "0.8", "--in", str(p)) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(0.68)
        assert len(payload["gradient"]) == 3

    def test_ci_spl_schema(self, tmp_path):
        data = tmp_path / "g.csv"
        assert run_cli("simulate", "--model", "garch11", "--omega", "0.1",
                       "--alpha", "0.1", "--beta", "0.8", "--T", "2000",
                       "--seed", "3", "--out", str(data)) == 0
        out = tmp_path / "ci.json"
        assert run_cli("ci", "--model", "garch11", "--scheme", "spl",
                       "--a", "0.5", "--b", "0.8", "--level", "0.9",
                       "--in", str(data), "--out", str(out)) == 0
        payload = json.loads(out.read_text())
        for key in ("center", "lower", "upper", "v_hat", "scheme", "T_E", "T_P"):
            assert key in payload
        assert payload["scheme"] == "spl"
        assert payload["lower"] <= payload["center"] <= payload["upper"]

    def test_coverage_report_and_jobs_determinism(self, tmp_path):
        out1, out2 = tmp_path / "c1.json", tmp_path / "c2.json"
        base = ["coverage", "--model", "ar1", "--beta", "0.5", "--T", "300",
                "--reps", "20", "--seed", "5", "--schemes", "2ip,spl,naive"]
        assert run_cli(*base, "--jobs", "1", "--out", str(out1)) == 0
        assert run_cli(*base, "--jobs", "4", "--out", str(out2)) == 0
        assert out1.read_text() == out2.read_text()
        payload = json.loads(out1.read_text())
        assert set(payload["schemes"]) == {"2ip", "spl", "naive"}

    def test_check_command(self, tmp_path):
        out = tmp_path / "check.json"
        decay = tmp_path / "decay.csv"
        assert run_cli("check", "--model", "garch11", "--omega", "0.1",
                       "--alpha", "0.1", "--beta", "0.8", "--T", "400",
                       "--seed", "2", "--out", str(out),
                       "--decay-out", str(decay)) == 0
        payload = json.loads(out.read_text())
        assert payload["gradient_check_max_err"] < 1e-6
        assert len(payload["decay_table"]) == 3
        assert payload["stationarity_margin"] < 0.0
        lines = decay.read_text().splitlines()
        assert lines[0] == "t1,gap" and len(lines) == 4
        assert float(lines[1].split(",")[1]) == payload["decay_table"][0]["gap"]

    def test_coverage_table_csv(self, tmp_path):
        table = tmp_path / "cov.csv"
        assert run_cli("coverage", "--model", "ar1", "--beta", "0.5",
                       "--T", "300", "--reps", "10", "--seed", "4",
                       "--table-out", str(table),
                       "--out", str(tmp_path / "cov.json")) == 0
        lines = table.read_text().splitlines()
        assert lines[0].startswith("scheme,coverage,")
        assert {ln.split(",")[0] for ln in lines[1:]} == {"2ip", "spl"}

    def test_risk_command_consistency(self, tmp_path):
        data = tmp_path / "t.csv"
        assert run_cli("simulate", "--model", "tgarch11", "--omega", "0.1",
                       "--alpha-plus", "0.05", "--alpha-minus", "0.15",
                       "--beta", "0.8", "--T", "2000", "--seed", "5",
                       "--out", str(data)) == 0
        out = tmp_path / "risk.json"
        assert run_cli("risk", "--model", "tgarch11", "--in", str(data),
                       "--a", "0.05", "--out", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["var"] == pytest.approx(-payload["xi_a"] * payload["psi"])
        assert payload["es"] == pytest.approx(payload["mu_a"] * payload["psi"])
        assert payload["es"] >= payload["var"] > 0

    def test_seed_env_fallback(self, tmp_path, monkeypatch):
        out1, out2, out3 = (tmp_path / n for n in ("e1.csv", "e2.csv", "e3.csv"))
        args = ["simulate", "--model", "ar1", "--beta", "0.5", "--T", "50"]
        monkeypatch.setenv("PREDFRAME_SEED", "99")
        run_cli(*args, "--out", str(out1))
        run_cli(*args, "--out", str(out2))
        assert out1.read_text() == out2.read_text()
        monkeypatch.setenv("PREDFRAME_SEED", "100")
        run_cli(*args, "--out", str(out3))
        assert out1.read_text() != out3.read_text()

    def test_config_file_defaults(self, tmp_path, capsys):
        p = tmp_path / "s3.csv"
        p.write_text("t,x\n1,1.0\n2,0.5\n3,0.25\n")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "ar1", "in": str(p)}))
        assert run_cli("estimate", "--config", str(cfg)) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["theta_hat"]["beta"] == pytest.approx(0.5)

    def test_exit_codes(self, tmp_path, capsys):
        # domain error: unreadable input
        assert run_cli("estimate", "--model", "ar1", "--in",
                       str(tmp_path / "nope.csv")) == 1
        # usage error: unknown scheme
        assert run_cli("ci", "--model", "ar1", "--scheme", "bogus",
                       "--in", "x.csv") == 2
        # domain error: missing required model parameter
        assert run_cli("simulate", "--model", "ar1", "--T", "10",
                       "--out", str(tmp_path / "o.csv")) == 1
        capsys.readouterr()
