import json

import numpy as np
import pandas as pd
import pytest

from purimeter import ConfigParser, DetectorModel, AcquisitionConfig, simulate_acquisition, read_series_csv
from purimeter.cli import main, build_parser

SMALL_RECORD = ["--bins", "12", "--per-bin", "300", "--seed", "5"]


def bound_rows(text):
    return {name: value for name, value in (line.split(None, 1) for line in text.strip().splitlines())}


@pytest.fixture
def recordPath(tmp_path):
    path = tmp_path / "record.csv"
    assert main(["simulate", "--thermal-nbar", "0.5", "-o", str(path)] + SMALL_RECORD) == 0
    return path


class TestCli:

    def test_simulate(self, tmp_path, capsys):
        path = tmp_path / "thermal.csv"
        assert main(["simulate", "--thermal-nbar", "0.5", "--seed", "7", "-o", str(path)]) == 0

        err = capsys.readouterr().err
        assert "pi_true=0.500000 F_true=0.750000" in err
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        assert lines[0] == "theta_rad,quadrature"
        assert len(lines) == 100801

    def test_simulate_is_repeatable(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            assert main(["simulate", "--state", "coherent(q=1, p=0)", "-o", str(path)] + SMALL_RECORD) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_simulate_with_shot_noise(self, tmp_path, capsys):
        path, shot = tmp_path / "record.csv", tmp_path / "shot.csv"
        assert main(["simulate", "--eta", "0.88", "--thermal-nbar", "1", "--shot-output", str(shot),
                     "-o", str(path)] + SMALL_RECORD) == 0
        assert "pi_effective=" in capsys.readouterr().err
        assert len(pd.read_csv(shot)) == 3600

    def test_bound_pure_state(self, capsys):
        assert main(["bound", "--pi", "1"]) == 0
        rows = bound_rows(capsys.readouterr().out)
        assert rows["piece"] == "1"
        assert float(rows["phi"]) == pytest.approx(1.0)
        assert float(rows["f_bound"]) == pytest.approx(0.0)

    def test_bound_from_f(self, capsys):
        assert main(["bound", "--f", "0.329"]) == 0
        rows = bound_rows(capsys.readouterr().out)
        assert float(rows["pi_f"]) == pytest.approx(0.6135, abs=1e-4)
        assert float(rows["t_eq"]) == pytest.approx(0.6998, abs=1e-3)
        assert float(rows["t_table"]) == pytest.approx(4.0 * float(rows["t_eq"]), abs=1e-5)
        assert float(rows["mean_photon"]) == pytest.approx(0.3150, abs=1e-4)

    def test_bound_from_zero_f(self, capsys):
        assert main(["bound", "--f", "0"]) == 0
        rows = bound_rows(capsys.readouterr().out)
        assert rows["t_eq"] == "0 (pure state)"
        assert float(rows["pi_f"]) == pytest.approx(1.0)

    def test_bound_grid(self, tmp_path, capsys):
        path = tmp_path / "bound.csv"
        assert main(["bound", "--grid", "0.05:1:0.01", "-o", str(path)]) == 0
        assert "max_rel_dev=" in capsys.readouterr().err
        table = pd.read_csv(path)
        assert len(table) == 96
        assert table["rel_dev"].max() <= 0.02

    def test_bound_needs_one_input(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["bound"])
        assert excinfo.value.code == 2

    def test_analyze_to_file(self, recordPath, tmp_path):
        output = tmp_path / "report.json"
        assert main(["analyze", str(recordPath), "-o", str(output)]) == 0
        report = json.loads(output.read_text(encoding="utf-8"))
        assert report["schema"] == 1
        assert report["meta"]["bin_count"] == 12
        assert report["meta"]["provenance"]["input"] == str(recordPath)

    def test_analyze_query(self, recordPath, capsys):
        assert main(["analyze", str(recordPath), "--query", "purity.pi_f"]) == 0
        pi_f = float(capsys.readouterr().out)
        assert 0.0 < pi_f <= 1.0

    def test_analyze_bad_record(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("theta_rad,quadrature\n0.1,abc\n", encoding="utf-8")
        assert main(["analyze", str(path)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_analyze_missing_record(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "missing.csv")]) == 3
        assert "I/O error" in capsys.readouterr().err

    def test_bad_state_spec(self, tmp_path, capsys):
        assert main(["simulate", "--state", "squeezed(r=1)", "-o", str(tmp_path / "x.csv")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_efficiency(self, recordPath):
        assert main(["analyze", str(recordPath), "--eta", "1.5"]) == 2

    def test_unknown_option(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["analyze", "record.csv", "--bins-mode", "grid12"])
        assert excinfo.value.code == 2

    def test_ensemble(self, tmp_path, capsys):
        config = tmp_path / "sweep.cfg"
        config.write_text("acquisitions = 12\nbins = 16\nper_bin = 200\nseed = 3\n", encoding="utf-8")
        assert main(["ensemble", str(config), "--workers", "2"]) == 0

        assert "delta_f_gauss" in capsys.readouterr().out
        records = pd.read_csv(tmp_path / "sweep_acquisitions.csv")
        assert len(records) == 12
        summary = json.loads((tmp_path / "sweep_summary.json").read_text(encoding="utf-8"))
        assert summary["acquisitions"] == 12

    def test_ensemble_bad_config(self, tmp_path):
        config = tmp_path / "bad.cfg"
        config.write_text("acquisitions = 12\nspeed = 3\n", encoding="utf-8")
        assert main(["ensemble", str(config)]) == 2

    def test_parser_commands(self):
        parser = build_parser()
        args = parser.parse_args(["bound", "--pi", "0.5"])
        assert args.command == "bound"
        assert args.pi == 0.5

    def test_analyze_sparse_bins(self, tmp_path, capsys):
        path = tmp_path / "sparse.csv"
        assert main(["simulate", "--thermal-nbar", "0.5", "--bins", "48", "--per-bin", "8", "--seed", "3",
                     "-o", str(path)]) == 0
        capsys.readouterr()

        assert main(["analyze", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["normality"]["bins_tested"] == 0
        assert report["normality"]["passed"] is None


class TestCliRoundTrip:

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("spec", ["thermal(nbar=0.5)", "coherent(q=2, p=0)", "gaussian(sqq=2, spp=0.5)",
                                      "vacuum"])
    def test_simulate_then_analyze(self, tmp_path, spec, seed):
        path = tmp_path / "record.csv"
        assert main(["simulate", "--state", spec, "--bins", "12", "--per-bin", "300", "--seed", str(seed),
                     "-o", str(path)]) == 0

        expected = simulate_acquisition(ConfigParser.parseStateSpec(spec), DetectorModel(),
                                        AcquisitionConfig(12, 300, seed))
        restored = read_series_csv(str(path))
        assert restored.sampleCounts == expected.sampleCounts
        assert np.allclose(restored.thetas, expected.thetas, rtol=1e-14, atol=0)
        for (_, original), (_, read_back) in zip(expected.bins, restored.bins):
            assert np.allclose(original, read_back, rtol=1e-14, atol=1e-15)

        reports = [tmp_path / "a.json", tmp_path / "b.json"]
        for report in reports:
            assert main(["analyze", str(path), "-o", str(report)]) == 0
        assert reports[0].read_bytes() == reports[1].read_bytes()
        result = json.loads(reports[0].read_text(encoding="utf-8"))
        assert 0.0 < result["purity"]["pi_f"] <= 1.0
