import json
import logging

import numpy as np
import pandas as pd
import pytest

from purimeter import EnsembleConfig, EnsembleRunner, ResidualSummary, GaussianState, \
    AcquisitionConfig, ConfigParser, DomainError, EnsembleError, run_ensemble, residual_trend
from purimeter.ensemble import RECORD_COLUMNS, VERDICT_SYSTEMATIC, VERDICT_RANDOM, VERDICT_INCONCLUSIVE


def small_config(**overrides):
    options = dict(nAcquisitions=12, acquisition=AcquisitionConfig(16, 200), masterSeed=3)
    options.update(overrides)
    return EnsembleConfig(**options)


def synthetic_summary(delta):
    pi = np.linspace(0.3, 0.95, len(delta))
    records = pd.DataFrame({"pi_true": pi, "delta_f_gauss": delta, "status": "ok"})
    return ResidualSummary(records)


class TestEnsembleConfig:

    def test_defaults(self):
        cfg = EnsembleConfig()
        assert cfg.nAcquisitions == 218
        assert cfg.purityRange == (0.3, 0.95)
        assert cfg.detector.efficiency == 0.88
        assert cfg.acquisition.bins == 48
        assert cfg.acquisition.samplesPerBin == 2100
        assert cfg.invertLoss

    def test_thermal_sweep(self):
        cfg = small_config()
        assert cfg.truePurity(0) == pytest.approx(0.3)
        assert cfg.truePurity(11) == pytest.approx(0.95)
        purities = [cfg.truePurity(i) for i in range(12)]
        assert np.allclose(np.diff(purities), (0.95 - 0.3) / 11)

    def test_truth_without_loss_inversion(self):
        cfg = small_config(invertLoss=False)
        assert cfg.truePurity(0) == pytest.approx(GaussianState.thermalFromPurity(0.3).afterLoss(0.88).purity)
        assert cfg.truePurity(0) > 0.3

    def test_explicit_states_cycle(self):
        states = [GaussianState.vacuum(), GaussianState.thermal(1.0)]
        cfg = small_config(states=states)
        assert cfg.stateFor(0) == states[0]
        assert cfg.stateFor(3) == states[1]

    def test_acquisition_seeds(self):
        cfg = small_config()
        seeds = [cfg.acquisitionFor(i).seed for i in range(12)]
        assert len(set(seeds)) == 12
        assert seeds == [small_config().acquisitionFor(i).seed for i in range(12)]
        assert cfg.acquisitionFor(0).samplesPerBin == 200

    @pytest.mark.parametrize("options",
                             [
                                 {"nAcquisitions": 1},
                                 {"purityRange": (0.0, 0.5)},
                                 {"purityRange": (0.6, 0.5)},
                                 {"purityRange": (0.3, 1.0)},
                                 {"states": []},
                                 {"states": ["vacuum"]},
                                 {"workers": 0},
                                 {"trendBins": 1},
                             ])
    def test_bad_config(self, options):
        with pytest.raises(DomainError):
            small_config(**options)

    def test_from_dict(self):
        options = ConfigParser.parseConfig("acquisitions = 30\npurity_range = 0.4:0.8\nefficiency = 0.9\n"
                                           "bins = 24\nper_bin = 500\nseed = 9\ninvert_loss = false\n"
                                           "states = thermal(nbar=0.5)\nworkers = 2\n")
        cfg = EnsembleConfig.fromDict(options)
        assert cfg.nAcquisitions == 30
        assert isinstance(cfg.nAcquisitions, int)
        assert cfg.purityRange == (0.4, 0.8)
        assert cfg.detector.efficiency == 0.9
        assert cfg.acquisition.bins == 24
        assert cfg.acquisition.samplesPerBin == 500
        assert cfg.masterSeed == 9
        assert not cfg.invertLoss
        assert cfg.workers == 2
        assert len(cfg.states) == 1

    def test_from_dict_unknown_key(self):
        with pytest.raises(DomainError):
            EnsembleConfig.fromDict({"acquisition": 20.0})

    def test_from_dict_non_integer(self):
        with pytest.raises(DomainError):
            EnsembleConfig.fromDict({"acquisitions": 20.5})

    @pytest.mark.parametrize("value", ["many", True])
    def test_from_dict_non_numeric_integer(self, value):
        with pytest.raises(DomainError):
            EnsembleConfig.fromDict({"acquisitions": value})

    def test_large_seed_is_exact(self):
        seed = 18446744073709551615
        cfg = EnsembleConfig.fromDict(ConfigParser.parseConfig(f"seed = {seed}\n"))
        assert cfg.masterSeed == seed
        assert cfg.toDict()["seed"] == seed
        assert cfg.acquisitionFor(0).seed != EnsembleConfig(masterSeed=seed - 1).acquisitionFor(0).seed

    def test_to_dict(self):
        result = small_config().toDict()
        assert result["acquisitions"] == 12
        assert result["states"] is None
        assert result["acquisition"]["samples_per_bin"] == 200
        json.dumps(result)


class TestEnsembleRunner:

    @pytest.fixture(autouse=True)
    def setupLogger(self):
        self.logger = logging.getLogger("TestEnsembleRunner")  # pylint: disable=attribute-defined-outside-init

    @pytest.fixture(scope="class")
    def summary(self):
        return run_ensemble(small_config())

    def test_records(self, summary):
        records = summary.records
        assert list(records.columns) == RECORD_COLUMNS
        assert summary.recordCount == 12
        assert summary.failureCount == 0
        assert list(records["index"]) == list(range(12))
        assert records["pi_f"].notna().all()
        assert records["pi_gauss"].notna().all()

    def test_residuals(self, summary):
        records = summary.records
        expected = (records["pi_f"] - records["pi_true"]) / ((records["pi_f"] + records["pi_true"]) / 2)
        assert np.allclose(records["delta_f_true"], expected)
        assert summary.residuals("delta_f_true").size == 12

    def test_population_stats(self, summary):
        stats = summary.populationStats("delta_gauss_true")
        assert stats["n"] == 12
        assert stats["sem"] == pytest.approx(stats["std"] / np.sqrt(12))
        assert stats["shapiro_p"] is not None

    def test_bad_residual_column(self, summary):
        with pytest.raises(DomainError):
            summary.residuals("pi_f")

    def test_reproducible(self, summary):
        again = run_ensemble(small_config())
        pd.testing.assert_frame_equal(again.records, summary.records)
        assert again.toJson() == summary.toJson()

    def test_workers_do_not_change_results(self, summary):
        threaded = EnsembleRunner(small_config(workers=3)).run()
        pd.testing.assert_frame_equal(threaded.records, summary.records)

    def test_summary_is_strict_json(self, summary):
        result = summary.toDict()
        json.dumps(result, allow_nan=False)
        assert set(result["populations"]) == {"delta_f_true", "delta_gauss_true", "delta_f_gauss"}
        assert set(result["trends"]) == {"delta_f_true", "delta_gauss_true", "delta_f_gauss"}

    def test_write_outputs(self, summary, tmp_path):
        csv_path = tmp_path / "run_acquisitions.csv"
        json_path = tmp_path / "run_summary.json"
        summary.writeCsv(str(csv_path))
        summary.writeJson(str(json_path))

        written = pd.read_csv(csv_path, dtype={"seed": str})
        assert len(written) == 12
        assert list(written["seed"]) == list(summary.records["seed"])
        assert json.loads(json_path.read_text(encoding="utf-8"))["acquisitions"] == 12

    def test_single_state_trend_is_inconclusive(self):
        summary = run_ensemble(small_config(states=[GaussianState.thermal(0.5)]))
        trend = residual_trend(summary, "delta_f_gauss")
        assert trend.verdict == VERDICT_INCONCLUSIVE
        assert "does not vary" in trend.note

    def test_too_few_records_is_inconclusive(self):
        summary = run_ensemble(small_config(nAcquisitions=5))
        assert residual_trend(summary, "delta_f_gauss").verdict == VERDICT_INCONCLUSIVE

    def test_failures_raise(self, caplog):
        caplog.set_level(logging.WARNING)
        # 16 bins cannot be rebinned to 47 without empty bins, so every analysis fails
        cfg = small_config(nAcquisitions=3, binsMode="paper47")
        with pytest.raises(EnsembleError):
            EnsembleRunner(cfg).run()
        assert any("acquisition 0 failed" in r.message for r in caplog.records)

    def test_failed_record(self):
        cfg = small_config(nAcquisitions=3, binsMode="paper47")
        record = EnsembleRunner(cfg).runAcquisition(1)
        assert record["status"].startswith("error:")
        assert np.isnan(record["pi_f"])
        assert record["pi_true"] == pytest.approx(cfg.truePurity(1))

    def test_explain(self):
        explanation = EnsembleRunner(small_config()).explain(suppressOutput=True)
        assert "acquisitions: 12" in explanation
        assert "thermal states" in explanation


class TestResidualTrend:

    def test_linear_trend_is_systematic(self):
        pi = np.linspace(0.3, 0.95, 40)
        delta = -0.15 * (1.0 - pi) + 0.002 * np.cos(37.0 * np.arange(40))
        trend = residual_trend(synthetic_summary(delta), "delta_f_gauss", nBins=5)

        assert trend.verdict == VERDICT_SYSTEMATIC
        assert trend.isSystematic
        assert trend.slope == pytest.approx(0.15, abs=0.01)
        assert trend.spearman_rho > 0.9
        assert sum(count for _, _, _, count in trend.bins) == 40
        assert len(trend.bins) == 5

    def test_symmetric_residuals_are_random(self):
        pi = np.linspace(0.3, 0.95, 40)
        delta = 0.05 * (pi - pi.mean()) ** 2
        trend = residual_trend(synthetic_summary(delta), "delta_f_gauss")

        assert trend.verdict == VERDICT_RANDOM
        assert trend.slope == pytest.approx(0.0, abs=1e-12)

    def test_trend_to_dict(self):
        pi = np.linspace(0.3, 0.95, 20)
        trend = residual_trend(synthetic_summary(-0.1 * (1.0 - pi)), "delta_f_gauss", nBins=4)
        result = trend.toDict()
        assert result["verdict"] == VERDICT_SYSTEMATIC
        assert len(result["bins"]) == 4
        assert set(result["bins"][0]) == {"pi", "mean", "sem", "count"}

    def test_bad_column(self):
        with pytest.raises(DomainError):
            residual_trend(synthetic_summary(np.zeros(20)), "delta")


@pytest.mark.slow
class TestFullEnsemble:

    @pytest.fixture(scope="class")
    def summary(self):
        return run_ensemble(EnsembleConfig(workers=4))

    def test_no_failures(self, summary):
        assert summary.recordCount == 218
        assert summary.failureCount == 0

    def test_f_estimator_underestimates_mixed_states(self, summary):
        records = summary.records
        lowest = records.loc[records["pi_true"].idxmin()]
        highest = records.loc[records["pi_true"].idxmax()]
        assert lowest["delta_f_true"] == pytest.approx(-0.108, abs=0.03)
        assert highest["delta_f_true"] == pytest.approx(-0.012, abs=0.03)

    def test_f_gauss_residuals_are_systematic(self, summary):
        assert summary.trendReports()["delta_f_gauss"].verdict == VERDICT_SYSTEMATIC

    def test_gauss_residuals_are_unbiased(self, summary):
        stats = summary.populationStats("delta_gauss_true")
        assert stats["n"] == 218
        assert stats["normal"] is True
        assert abs(stats["mean"]) <= 3.0 * stats["sem"]
        assert summary.trendReports()["delta_gauss_true"].verdict != VERDICT_SYSTEMATIC

    def test_f_gauss_gap_narrows_with_purity(self, summary):
        trend = summary.trendReports()["delta_f_gauss"]
        assert trend.slope > 0
        assert trend.abs_slope < 0
        assert all(mean < 0 for _, mean, _, _ in trend.bins)
