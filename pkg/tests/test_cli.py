import json

import numpy as np
import pytest

from nyscode import cli
from nyscode.data import load_csv


def _write_config(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


CURVE_CFG = {
    "c_grid": [4, 8, 16],
    "seeds": [0, 1],
    "d": 16,
    "k": 2,
    "n_samples": 120,
    "classes": 2,
    "noise": 0.1,
    "data_seed": 0,
}


class TestSynthCommand:
    def test_writes_loadable_csv(self, tmp_path):
        out = tmp_path / "data.csv"
        rc = cli.main(
            ["synth", "--d", "8", "--k", "2", "--n", "30", "--classes", "3", "--out", str(out)]
        )
        assert rc == 0
        ds = load_csv(out, has_labels=True)
        assert ds.data.d == 8
        assert ds.data.N == 30
        assert ds.n_classes == 3

    def test_deterministic_given_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["synth", "--n", "20", "--seed", "5", "--out", str(a)])
        cli.main(["synth", "--n", "20", "--seed", "5", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_requires_out(self):
        assert cli.main(["synth", "--n", "20"]) == cli.EXIT_ARGUMENT


class TestCurveCommand:
    def test_json_report(self, tmp_path):
        cfg = _write_config(tmp_path, CURVE_CFG)
        out = tmp_path / "report.json"
        rc = cli.main(["curve", "--config", cfg, "--out", str(out), "--format", "json"])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "curve"
        assert len(report["curve"]) == 3

    def test_csv_reruns_byte_identical(self, tmp_path):
        cfg = _write_config(tmp_path, CURVE_CFG)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["curve", "--config", cfg, "--out", str(a), "--format", "csv"]) == 0
        assert cli.main(["curve", "--config", cfg, "--out", str(b), "--format", "csv"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, dict(CURVE_CFG, turbo=True))
        assert cli.main(["curve", "--config", cfg]) == cli.EXIT_ARGUMENT
        assert "unknown config keys" in capsys.readouterr().err

    def test_missing_config_exits_2(self):
        assert cli.main(["curve"]) == cli.EXIT_ARGUMENT

    def test_invalid_json_exits_2(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert cli.main(["curve", "--config", str(p)]) == cli.EXIT_ARGUMENT


class TestPdlCommand:
    def test_runs_small_comparison(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            {
                "final_c_grid": [4],
                "overshoots": [1, 2],
                "seeds": [0],
                "images_per_class": 15,
                "prototypes_per_class": 4,
                "kmeans_iters": 10,
            },
        )
        out = tmp_path / "pdl.json"
        assert cli.main(["pdl", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "pdl"
        assert len(report["pdl_rows"]) == 2


class TestNystromEvalCommand:
    def test_reports_coverage(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            {"c_grid": [4, 8], "seeds": [0, 1], "k_list": [2], "d": 10, "n_samples": 32},
        )
        out = tmp_path / "nys.json"
        assert cli.main(["nystrom-eval", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "nystrom_eval"
        assert 0.0 <= report["coverage"] <= 1.0


class TestEncodeCommand:
    def test_encodes_csv_dataset(self, tmp_path):
        data = tmp_path / "data.csv"
        cli.main(["synth", "--d", "6", "--k", "2", "--n", "25", "--out", str(data)])
        out = tmp_path / "codes.csv"
        rc = cli.main(
            ["encode", "--data", str(data), "--labels", "--c", "5", "--out", str(out)]
        )
        assert rc == 0
        codes = np.loadtxt(out, delimiter=",")
        assert codes.shape == (25, 5)
        assert codes.min() >= 0.0

    def test_format_error_exits_3(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3\n")
        assert (
            cli.main(["encode", "--data", str(bad), "--c", "1", "--out", "x.csv"])
            == cli.EXIT_FORMAT
        )

    def test_missing_file_exits_2(self, tmp_path):
        assert (
            cli.main(["encode", "--data", str(tmp_path / "nope.csv"), "--c", "1"])
            == cli.EXIT_ARGUMENT
        )

    def test_c_larger_than_dataset_exits_2(self, tmp_path):
        data = tmp_path / "data.csv"
        cli.main(["synth", "--d", "4", "--k", "2", "--n", "10", "--out", str(data)])
        assert (
            cli.main(["encode", "--data", str(data), "--labels", "--c", "99"])
            == cli.EXIT_ARGUMENT
        )


class TestExitCodes:
    def test_numerical_failure_exits_4(self, monkeypatch):
        def boom(args):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setitem(cli._COMMANDS, "curve", boom)
        assert cli.main(["curve"]) == cli.EXIT_NUMERICAL

    def test_stdout_output_when_no_out(self, tmp_path, capsys):
        cfg = _write_config(
            tmp_path,
            {"c_grid": [4, 8], "seeds": [0], "k_list": [2], "d": 10, "n_samples": 32},
        )
        assert cli.main(["nystrom-eval", "--config", cfg, "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("k,c,seed,")
