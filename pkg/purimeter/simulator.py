#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""
This file defines the `HomodyneSimulator` class and the types describing a simulated balanced homodyne acquisition

A simulated acquisition scans the local oscillator phase over ``[0, pi)`` in `bins` equal intervals and records
`samplesPerBin` quadrature values at the center of each interval. Detection losses are modelled as vacuum
admixture (amplitudes scaled by ``sqrt(eta)``, variances mixed with the shot noise level) and electronic noise as
an independent additive variance.
"""
import copy
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from .distributions import Normal
from .gaussian_state import GaussianState, sigma_xx
from .purimeter_constants import DEFAULT_BIN_COUNT, DEFAULT_SAMPLES_PER_BIN, DEFAULT_RANDOM_SEED, \
    MIN_BIN_COUNT, MIN_SAMPLES_PER_BIN, VACUUM_VARIANCE, CSV_THETA_COLUMN, CSV_QUADRATURE_COLUMN
from .utils import ensure, DomainError, derive_seed_sequence

_MAX_SEED = 2 ** 64


class DetectorModel:
    """ Balanced homodyne detector model

    :param efficiency: overall quantum efficiency `eta` in (0, 1]
    :param electronicNoiseVariance: additive dimensionless quadrature variance of the electronics, >= 0
    """

    def __init__(self, efficiency=1.0, electronicNoiseVariance=0.0):
        ensure(efficiency is not None and 0.0 < efficiency <= 1.0,
               f"quantum efficiency must be in (0, 1], not `{efficiency}`", DomainError)
        ensure(electronicNoiseVariance is not None and electronicNoiseVariance >= 0.0,
               f"electronic noise variance must be non-negative, not `{electronicNoiseVariance}`", DomainError)
        self._efficiency = float(efficiency)
        self._electronicNoiseVariance = float(electronicNoiseVariance)

    @classmethod
    def fromNoiseDecibels(cls, efficiency, decibelsBelowShotNoise):
        """ Create detector whose electronic noise lies `decibelsBelowShotNoise` dB below the shot noise

        The decibel figure is interpreted as a variance ratio relative to the vacuum variance 1/2.
        """
        return cls(efficiency, VACUUM_VARIANCE * 10.0 ** (-decibelsBelowShotNoise / 10.0))

    @property
    def efficiency(self):
        """ Return quantum efficiency"""
        return self._efficiency

    @property
    def electronicNoiseVariance(self):
        """ Return additive electronic noise variance"""
        return self._electronicNoiseVariance

    def withEfficiency(self, efficiency):
        """ Return copy of detector with efficiency changed"""
        return DetectorModel(efficiency, self._electronicNoiseVariance)

    def withElectronicNoise(self, variance):
        """ Return copy of detector with electronic noise variance changed"""
        return DetectorModel(self._efficiency, variance)

    def observedMean(self, state, theta):
        """ Mean of the recorded quadrature at phase `theta`"""
        return math.sqrt(self._efficiency) * state.quadratureMean(math.cos(theta), math.sin(theta))

    def observedVariance(self, state, theta):
        """ Variance of the recorded quadrature at phase `theta`"""
        return (self._efficiency * sigma_xx(state.cov, math.cos(theta), math.sin(theta))
                + (1.0 - self._efficiency) * VACUUM_VARIANCE + self._electronicNoiseVariance)

    def toDict(self):
        """ Return detector parameters as dictionary"""
        return {"efficiency": self._efficiency, "electronic_noise_variance": self._electronicNoiseVariance}

    def __eq__(self, other):
        return isinstance(other, DetectorModel) and self.toDict() == other.toDict()

    def __hash__(self):
        return hash((self._efficiency, self._electronicNoiseVariance))

    def __repr__(self):
        return f"DetectorModel(efficiency={self._efficiency}, electronicNoiseVariance={self._electronicNoiseVariance})"


class AcquisitionConfig:
    """ Acquisition geometry of a simulated homodyne record

    :param bins: number of phase bins over ``[0, pi)``, at least 3
    :param samplesPerBin: number of quadrature samples per bin, at least 2
    :param seed: 64-bit unsigned integer seed
    """

    def __init__(self, bins=DEFAULT_BIN_COUNT, samplesPerBin=DEFAULT_SAMPLES_PER_BIN, seed=DEFAULT_RANDOM_SEED):
        ensure(isinstance(bins, (int, np.integer)) and bins >= MIN_BIN_COUNT,
               f"at least {MIN_BIN_COUNT} phase bins are required, not `{bins}`", DomainError)
        ensure(isinstance(samplesPerBin, (int, np.integer)) and samplesPerBin >= MIN_SAMPLES_PER_BIN,
               f"at least {MIN_SAMPLES_PER_BIN} samples per bin are required, not `{samplesPerBin}`", DomainError)
        ensure(isinstance(seed, (int, np.integer)) and 0 <= seed < _MAX_SEED,
               f"seed must be a 64-bit unsigned integer, not `{seed}`", DomainError)
        self._bins = int(bins)
        self._samplesPerBin = int(samplesPerBin)
        self._seed = int(seed)

    @property
    def bins(self):
        """ Return number of phase bins"""
        return self._bins

    @property
    def samplesPerBin(self):
        """ Return number of samples per bin"""
        return self._samplesPerBin

    @property
    def seed(self):
        """ Return seed"""
        return self._seed

    @property
    def sampleCount(self):
        """ Return total number of samples in an acquisition"""
        return self._bins * self._samplesPerBin

    def binCenters(self):
        """ Return phase bin centers ``(j + 1/2) * pi / bins`` as numpy array"""
        return bin_centers(self._bins)

    def withSeed(self, seed):
        """ Return copy of config with seed changed"""
        return AcquisitionConfig(self._bins, self._samplesPerBin, seed)

    def withBins(self, bins):
        """ Return copy of config with bin count changed"""
        return AcquisitionConfig(bins, self._samplesPerBin, self._seed)

    def withSamplesPerBin(self, samplesPerBin):
        """ Return copy of config with samples per bin changed"""
        return AcquisitionConfig(self._bins, samplesPerBin, self._seed)

    def toDict(self):
        """ Return config as dictionary"""
        return {"bins": self._bins, "samples_per_bin": self._samplesPerBin, "seed": self._seed}

    def __eq__(self, other):
        return isinstance(other, AcquisitionConfig) and self.toDict() == other.toDict()

    def __hash__(self):
        return hash((self._bins, self._samplesPerBin, self._seed))

    def __repr__(self):
        return f"AcquisitionConfig(bins={self._bins}, samplesPerBin={self._samplesPerBin}, seed={self._seed})"


def bin_centers(n_bins):
    """ Centers ``(j + 1/2) * pi / n_bins`` of `n_bins` uniform phase bins over ``[0, pi)``"""
    return (np.arange(n_bins) + 0.5) * math.pi / n_bins


class PhaseBinnedSeries:
    """ Homodyne record with quadrature samples grouped by local oscillator phase bin

    :param bins: sequence of ``(theta_center, samples)`` pairs with strictly increasing centers in ``[0, pi)``
                 and non-empty sample arrays
    """

    def __init__(self, bins):
        ensure(bins is not None and len(bins) > 0, "a phase binned series needs at least one bin", DomainError)
        thetas = np.array([float(theta) for theta, _ in bins])
        ensure(bool(np.all((thetas >= 0.0) & (thetas < math.pi))), "bin centers must lie in [0, pi)", DomainError)
        ensure(bool(np.all(np.diff(thetas) > 0)), "bin centers must be strictly increasing", DomainError)

        self._bins = []
        for theta, samples in bins:
            values = np.asarray(samples, dtype=float)
            ensure(values.ndim == 1 and values.size > 0, f"bin at theta={theta:.6f} has no samples", DomainError)
            self._bins.append((float(theta), values))

    @property
    def bins(self):
        """ Return list of ``(theta_center, samples)`` pairs"""
        return list(self._bins)

    @property
    def thetas(self):
        """ Return bin centers as numpy array"""
        return np.array([theta for theta, _ in self._bins])

    @property
    def binCount(self):
        """ Return number of bins"""
        return len(self._bins)

    @property
    def sampleCounts(self):
        """ Return list of sample counts per bin"""
        return [samples.size for _, samples in self._bins]

    @property
    def sampleCount(self):
        """ Return total number of samples"""
        return sum(self.sampleCounts)

    def samplesAt(self, index):
        """ Return samples of bin `index`"""
        return self._bins[index][1]

    def toPandas(self):
        """ Return record as pandas dataframe with one row per sample, grouped by ascending bin

        :returns: dataframe with columns `theta_rad` and `quadrature`
        """
        thetas = np.concatenate([np.full(samples.size, theta) for theta, samples in self._bins])
        values = np.concatenate([samples for _, samples in self._bins])
        return pd.DataFrame({CSV_THETA_COLUMN: thetas, CSV_QUADRATURE_COLUMN: values})

    @classmethod
    def fromPandas(cls, df):
        """ Reconstruct record from a dataframe, one bin per distinct `theta_rad` value

        Samples keep their order of appearance within each bin.

        :param df: dataframe with columns `theta_rad` and `quadrature`
        :returns: `PhaseBinnedSeries`
        """
        ensure(CSV_THETA_COLUMN in df.columns and CSV_QUADRATURE_COLUMN in df.columns,
               f"dataframe must have columns `{CSV_THETA_COLUMN}` and `{CSV_QUADRATURE_COLUMN}`", DomainError)
        grouped = df.groupby(CSV_THETA_COLUMN, sort=True)[CSV_QUADRATURE_COLUMN]
        return cls([(theta, group.to_numpy(dtype=float)) for theta, group in grouped])

    def rebinned(self, n_bins):
        """ Regroup samples into `n_bins` uniform phase bins over ``[0, pi)``

        Each sample is assigned by the center of the bin it was recorded in.

        :param n_bins: number of bins of the new record
        :returns: new `PhaseBinnedSeries`
        :raises: `DomainError` if a new bin would be empty
        """
        ensure(n_bins >= MIN_BIN_COUNT, f"at least {MIN_BIN_COUNT} phase bins are required", DomainError)
        width = math.pi / n_bins
        groups = [[] for _ in range(n_bins)]
        for theta, samples in self._bins:
            groups[min(int(theta // width), n_bins - 1)].append(samples)

        centers = bin_centers(n_bins)
        for index, group in enumerate(groups):
            ensure(len(group) > 0, f"rebinning to {n_bins} bins leaves bin {index} at theta={centers[index]:.4f} "
                                   "empty", DomainError)
        return PhaseBinnedSeries([(centers[i], np.concatenate(group)) for i, group in enumerate(groups)])

    def __eq__(self, other):
        if not isinstance(other, PhaseBinnedSeries) or other.binCount != self.binCount:
            return False
        return all(t1 == t2 and np.array_equal(s1, s2) for (t1, s1), (t2, s2) in zip(self._bins, other._bins))

    __hash__ = None

    def __repr__(self):
        return f"PhaseBinnedSeries(bins={self.binCount}, samples={self.sampleCount})"


def rebin(series, n_bins):
    """ Regroup the samples of `series` into `n_bins` uniform phase bins - see `PhaseBinnedSeries.rebinned`"""
    return series.rebinned(n_bins)


class HomodyneSimulator:
    """ Generator of synthetic balanced homodyne acquisitions

    :param state: `GaussianState` to measure, defaults to the vacuum
    :param detector: `DetectorModel`, defaults to an ideal detector
    :param config: `AcquisitionConfig`, defaults to 48 bins of 2100 samples
    :param workers: if greater than 1, phase bins are generated on a thread pool of this size
    :param verbose: = if `True`, generate verbose output
    :param debug: = if set to True, output debug level of information

    Each bin draws from a random stream derived from ``(seed, bin index)``, so the generated record does not
    depend on `workers` or on scheduling.
    """

    def __init__(self, state=None, detector=None, config=None, workers=None, verbose=False, debug=False):
        self.verbose = verbose
        self.debug = debug
        self._setupLogger()

        self._state = state if state is not None else GaussianState.vacuum()
        self._detector = detector if detector is not None else DetectorModel()
        self._config = config if config is not None else AcquisitionConfig()
        self._workers = workers

        ensure(isinstance(self._state, GaussianState), "state must be a GaussianState", DomainError)
        ensure(isinstance(self._detector, DetectorModel), "detector must be a DetectorModel", DomainError)
        ensure(isinstance(self._config, AcquisitionConfig), "config must be an AcquisitionConfig", DomainError)
        ensure(workers is None or workers >= 1, "workers must be at least 1", DomainError)

    def _setupLogger(self):
        """Set up logging

        This will set the logger at warning, info or debug levels depending on the instance construction parameters
        """
        self.logger = logging.getLogger("HomodyneSimulator")
        if self.debug:
            self.logger.setLevel(logging.DEBUG)
        elif self.verbose:
            self.logger.setLevel(logging.INFO)
        else:
            self.logger.setLevel(logging.WARNING)

    @property
    def state(self):
        """ Return the measured state"""
        return self._state

    @property
    def detector(self):
        """ Return the detector model"""
        return self._detector

    @property
    def config(self):
        """ Return the acquisition config"""
        return self._config

    def _copyWith(self, **changes):
        new_copy = copy.copy(self)
        for key, value in changes.items():
            setattr(new_copy, key, value)
        return new_copy

    def withState(self, state):
        """ Return copy of simulator measuring `state`"""
        return self._copyWith(_state=state)

    def withDetector(self, detector):
        """ Return copy of simulator using `detector`"""
        return self._copyWith(_detector=detector)

    def withConfig(self, config):
        """ Return copy of simulator using acquisition config `config`"""
        return self._copyWith(_config=config)

    def withSeed(self, seed):
        """ Return copy of simulator with the acquisition seed changed"""
        return self._copyWith(_config=self._config.withSeed(seed))

    def effectiveState(self):
        """ Gaussian state whose ideal statistics match the detected ones, ignoring electronic noise"""
        return self._state.afterLoss(self._detector.efficiency)

    def binDistribution(self, index):
        """ Sampling distribution of bin `index`

        :returns: `Normal` distribution seeded with the stream derived for the bin
        """
        theta = self._config.binCenters()[index]
        return Normal(self._detector.observedMean(self._state, theta),
                      self._detector.observedVariance(self._state, theta)) \
            .withRandomSeed(derive_seed_sequence(self._config.seed, index))

    def _generateBin(self, index):
        theta = self._config.binCenters()[index]
        samples = self.binDistribution(index).generateSample(self._config.samplesPerBin)
        return theta, samples

    def build(self):
        """ Generate the acquisition

        :returns: `PhaseBinnedSeries`
        """
        indices = range(self._config.bins)
        self.logger.info("simulating %d bins x %d samples (seed %d)", self._config.bins,
                         self._config.samplesPerBin, self._config.seed)

        if self._workers is not None and self._workers > 1:
            with ThreadPoolExecutor(max_workers=self._workers) as executor:
                bins = list(executor.map(self._generateBin, indices))
        else:
            bins = [self._generateBin(index) for index in indices]

        return PhaseBinnedSeries(bins)

    def explain(self, suppressOutput=False):
        """Explain the simulated acquisition

        :param suppressOutput: If True, suppress display of explanation
        :returns: String containing explanation of the simulation with this configuration
        """
        effective = self.effectiveState()
        output = ["",
                  "Homodyne simulation", "===================",
                  f"state: {self._state}",
                  f"detector: {self._detector}",
                  f"acquisition: {self._config}",
                  f"source purity: {self._state.purity:.6f}",
                  f"effective purity: {effective.purity:.6f}",
                  f"effective uncertainty function: {effective.uncertaintyFunction:.6f}",
                  ""]

        explain_results = "\n".join(output)
        if not suppressOutput:
            print(explain_results)

        return explain_results

    def __repr__(self):
        return f"HomodyneSimulator(state={self._state}, detector={self._detector}, config={self._config})"


def simulate_acquisition(state, det, cfg, workers=None):
    """ Simulate a phase binned homodyne acquisition of `state`

    :param state: `GaussianState`
    :param det: `DetectorModel`
    :param cfg: `AcquisitionConfig`
    :param workers: optional thread count for concurrent bin generation
    :returns: `PhaseBinnedSeries`
    """
    return HomodyneSimulator(state, det, cfg, workers=workers).build()


def simulate_shot_noise(det, cfg, workers=None):
    """ Simulate a shot noise calibration record (blocked signal input, i.e. the vacuum)

    :param det: `DetectorModel`
    :param cfg: `AcquisitionConfig`
    :param workers: optional thread count for concurrent bin generation
    :returns: `PhaseBinnedSeries`
    """
    return simulate_acquisition(GaussianState.vacuum(), det, cfg, workers=workers)
