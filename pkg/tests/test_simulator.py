import logging
import math

import numpy as np
import pytest

from purimeter import DetectorModel, AcquisitionConfig, PhaseBinnedSeries, HomodyneSimulator, GaussianState, \
    DomainError, VACUUM_VARIANCE, simulate_acquisition, simulate_shot_noise, rebin
from purimeter.distributions import Normal
from purimeter.simulator import bin_centers


class TestSimulator:

    @pytest.fixture(autouse=True)
    def setupLogger(self):
        self.logger = logging.getLogger("TestSimulator")  # pylint: disable=attribute-defined-outside-init

    def test_bin_centers(self):
        centers = bin_centers(4)
        assert centers == pytest.approx([math.pi / 8, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8])

    def test_acquisition_config_defaults(self):
        cfg = AcquisitionConfig()
        assert cfg.bins == 48
        assert cfg.samplesPerBin == 2100
        assert cfg.sampleCount == 100800
        assert len(cfg.binCenters()) == 48

    def test_acquisition_config_copies(self):
        cfg = AcquisitionConfig(8, 100, 1)
        assert cfg.withSeed(2).seed == 2
        assert cfg.withBins(16).bins == 16
        assert cfg.withSamplesPerBin(50).samplesPerBin == 50
        assert cfg.seed == 1
        assert cfg == AcquisitionConfig(8, 100, 1)

    @pytest.mark.parametrize("bins,per_bin,seed",
                             [
                                 (2, 100, 1),
                                 (8, 1, 1),
                                 (8, 100, -1),
                                 (8, 100, 2 ** 64),
                                 (8.5, 100, 1),
                             ])
    def test_acquisition_config_bad(self, bins, per_bin, seed):
        with pytest.raises(DomainError):
            AcquisitionConfig(bins, per_bin, seed)

    def test_detector_variance(self):
        det = DetectorModel(0.8, 0.1)
        state = GaussianState.thermal(1.0)
        assert det.observedVariance(state, 0.3) == pytest.approx(0.8 * 1.5 + 0.2 * 0.5 + 0.1)

    def test_detector_mean(self):
        det = DetectorModel(0.81)
        state = GaussianState.coherent(2.0, 1.0)
        assert det.observedMean(state, 0.0) == pytest.approx(1.8)
        assert det.observedMean(state, math.pi / 2) == pytest.approx(0.9)

    def test_detector_from_decibels(self):
        det = DetectorModel.fromNoiseDecibels(0.9, 10.0)
        assert det.electronicNoiseVariance == pytest.approx(0.05)
        assert det.efficiency == 0.9

    @pytest.mark.parametrize("efficiency,noise", [(0.0, 0.0), (1.1, 0.0), (0.9, -0.1)])
    def test_detector_bad(self, efficiency, noise):
        with pytest.raises(DomainError):
            DetectorModel(efficiency, noise)

    def test_detector_copies(self):
        det = DetectorModel(0.9, 0.01)
        assert det.withEfficiency(0.5).efficiency == 0.5
        assert det.withElectronicNoise(0.02).electronicNoiseVariance == 0.02
        assert det.toDict() == {"efficiency": 0.9, "electronic_noise_variance": 0.01}

    def test_build_shape(self):
        series = simulate_acquisition(GaussianState.thermal(0.5), DetectorModel(), AcquisitionConfig(16, 300, 5))
        assert series.binCount == 16
        assert series.sampleCounts == [300] * 16
        assert series.sampleCount == 4800
        assert series.thetas == pytest.approx(bin_centers(16))

    def test_determinism(self):
        state = GaussianState.thermal(0.5)
        series1 = simulate_acquisition(state, DetectorModel(0.9), AcquisitionConfig(12, 200, 77))
        series2 = simulate_acquisition(state, DetectorModel(0.9), AcquisitionConfig(12, 200, 77))
        series3 = simulate_acquisition(state, DetectorModel(0.9), AcquisitionConfig(12, 200, 78))
        assert series1 == series2
        assert series1 != series3

    def test_workers_do_not_change_output(self):
        state = GaussianState.general(0.8, 0.5, 0.1, 1.0, 0.0)
        cfg = AcquisitionConfig(24, 500, 123)
        serial = simulate_acquisition(state, DetectorModel(0.88), cfg)
        threaded = simulate_acquisition(state, DetectorModel(0.88), cfg, workers=4)
        assert serial == threaded

    def test_vacuum_variance(self):
        series = simulate_shot_noise(DetectorModel(), AcquisitionConfig(seed=3))
        pooled = np.concatenate([samples for _, samples in series.bins])
        assert pooled.size == 100800
        assert np.var(pooled) == pytest.approx(0.5, abs=0.01)
        assert np.mean(pooled) == pytest.approx(0.0, abs=0.01)

    def test_vacuum_bin_distribution(self):
        sim = HomodyneSimulator(GaussianState.vacuum(), DetectorModel(0.7), AcquisitionConfig(4, 20, 1))
        for index in range(4):
            distribution = sim.binDistribution(index)
            assert isinstance(distribution, Normal)
            assert distribution.mean == pytest.approx(0.0)
            assert distribution.variance == pytest.approx(VACUUM_VARIANCE)

    def test_coherent_means(self):
        series = simulate_acquisition(GaussianState.coherent(2.0, 0.0), DetectorModel(), AcquisitionConfig(8, 4000, 9))
        for theta, samples in series.bins:
            assert np.mean(samples) == pytest.approx(2.0 * math.cos(theta), abs=0.05)
            assert np.var(samples) == pytest.approx(0.5, abs=0.05)

    def test_with_copies(self):
        sim = HomodyneSimulator(GaussianState.thermal(0.5), DetectorModel(0.9), AcquisitionConfig(8, 50, 1))
        assert sim.withSeed(2).config.seed == 2
        assert sim.config.seed == 1
        assert sim.withState(GaussianState.vacuum()).state == GaussianState.vacuum()
        assert sim.withDetector(DetectorModel()).detector.efficiency == 1.0
        assert sim.withConfig(AcquisitionConfig(4, 20, 1)).config.bins == 4

    def test_effective_state(self):
        sim = HomodyneSimulator(GaussianState.thermal(0.5), DetectorModel(0.88))
        assert sim.effectiveState().cov.sigma_qq == pytest.approx(0.94)

    def test_explain(self):
        sim = HomodyneSimulator(GaussianState.thermal(0.5), DetectorModel(0.88))
        explanation = sim.explain(suppressOutput=True)
        assert "source purity: 0.500000" in explanation
        assert "effective purity" in explanation

    def test_bad_simulator_arguments(self):
        with pytest.raises(DomainError):
            HomodyneSimulator(state="vacuum")
        with pytest.raises(DomainError):
            HomodyneSimulator(workers=0)


class TestPhaseBinnedSeries:

    def test_validation(self):
        with pytest.raises(DomainError):
            PhaseBinnedSeries([])
        with pytest.raises(DomainError):
            PhaseBinnedSeries([(0.5, [1.0, 2.0]), (0.2, [1.0, 2.0])])
        with pytest.raises(DomainError):
            PhaseBinnedSeries([(3.5, [1.0, 2.0])])
        with pytest.raises(DomainError):
            PhaseBinnedSeries([(0.5, [])])

    def test_pandas_round_trip(self):
        series = simulate_acquisition(GaussianState.thermal(0.2), DetectorModel(), AcquisitionConfig(6, 40, 2))
        df = series.toPandas()
        assert list(df.columns) == ["theta_rad", "quadrature"]
        assert len(df) == 240
        assert PhaseBinnedSeries.fromPandas(df) == series

    def test_rebin_halves_bin_count(self):
        series = simulate_acquisition(GaussianState.vacuum(), DetectorModel(), AcquisitionConfig(96, 30, 4))
        rebinned = rebin(series, 48)
        assert rebinned.binCount == 48
        assert rebinned.sampleCounts == [60] * 48
        assert rebinned.sampleCount == series.sampleCount
        assert rebinned.thetas == pytest.approx(bin_centers(48))

    def test_rebin_to_47(self):
        series = simulate_acquisition(GaussianState.vacuum(), DetectorModel(), AcquisitionConfig(96, 30, 4))
        rebinned = series.rebinned(47)
        assert rebinned.binCount == 47
        assert rebinned.sampleCount == series.sampleCount

    def test_rebin_empty_bin(self):
        series = simulate_acquisition(GaussianState.vacuum(), DetectorModel(), AcquisitionConfig(8, 30, 4))
        with pytest.raises(DomainError):
            series.rebinned(48)
