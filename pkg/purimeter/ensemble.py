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
This module defines the ``EnsembleRunner`` class, which simulates and analyzes many acquisitions and summarizes the
residuals of the purity estimators against the simulated ground truth

Residuals are normalized differences ``(a - b) / ((a + b) / 2)``:

* ``delta_f_true`` - F based purity against the true purity
* ``delta_gauss_true`` - Gaussian route purity against the true purity
* ``delta_f_gauss`` - F based purity against the Gaussian route purity
"""

import copy
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from .analysis import HomodyneAnalyzer
from .gaussian_state import GaussianState
from .gaussianity import shapiro_wilk, subsample
from .purimeter_constants import (DEFAULT_ACQUISITION_COUNT, DEFAULT_PURITY_RANGE, DEFAULT_RANDOM_SEED,
                                  DEFAULT_EFFICIENCY, DEFAULT_SIGNIFICANCE, F_STATISTIC_MEAN, BINS_MODE_NATIVE,
                                  MAX_FAILURE_FRACTION, MIN_TREND_RECORDS, DEFAULT_TREND_BINS, SHAPIRO_MIN_SAMPLES,
                                  DEFAULT_BIN_COUNT, DEFAULT_SAMPLES_PER_BIN, DEFAULT_ELECTRONIC_NOISE_VARIANCE)
from .simulator import AcquisitionConfig, DetectorModel, HomodyneSimulator
from .utils import ensure, derive_seed, relative_difference, DomainError, EnsembleError, PurimeterError

DELTA_COLUMNS = ("delta_f_true", "delta_gauss_true", "delta_f_gauss")
RECORD_COLUMNS = ["index", "seed", "status", "pi_true", "pi_f", "pi_f_exact", "pi_gauss", "f_mean", "f_min",
                  "delta_f_true", "delta_gauss_true", "delta_f_gauss"]

VERDICT_SYSTEMATIC = "systematic"
VERDICT_RANDOM = "random"
VERDICT_INCONCLUSIVE = "inconclusive"

# smallest spread of true purities over which a trend is meaningful
_MIN_PURITY_SPREAD = 1e-6


def _as_int(value, name):
    ensure(not isinstance(value, bool), f"`{name}` must be an integer, not `{value}`", DomainError)
    if isinstance(value, (int, np.integer)):
        return int(value)
    ensure(isinstance(value, (float, np.floating)) and float(value).is_integer(),
           f"`{name}` must be an integer, not `{value}`", DomainError)
    return int(value)


class EnsembleConfig:
    """ Configuration of an ensemble of simulated acquisitions

    :param nAcquisitions: number of acquisitions, at least 2
    :param purityRange: ``(lo, hi)`` range of thermal state purities, spaced evenly over the acquisitions
    :param states: optional explicit list of `GaussianState`, used cyclically instead of the thermal sweep
    :param detector: `DetectorModel`, defaults to efficiency 0.88
    :param acquisition: `AcquisitionConfig` template; its seed is replaced per acquisition
    :param masterSeed: seed from which per acquisition seeds are derived
    :param invertLoss: if True the analysis inverts detector losses and the truth is the source purity, otherwise
                       the truth is the purity of the detected state
    :param alpha: significance level for normality checks
    :param fStatistic: F statistic used by the estimators
    :param binsMode: analysis bins mode
    :param workers: number of acquisitions run concurrently
    :param trendBins: number of purity bins in the trend reports
    """

    _KEYS = {"acquisitions", "purity_range", "states", "efficiency", "electronic_noise", "bins", "per_bin", "seed",
             "invert_loss", "alpha", "f_statistic", "bins_mode", "workers", "trend_bins"}

    def __init__(self, nAcquisitions=DEFAULT_ACQUISITION_COUNT, purityRange=DEFAULT_PURITY_RANGE, states=None,
                 detector=None, acquisition=None, masterSeed=DEFAULT_RANDOM_SEED, invertLoss=True,
                 alpha=DEFAULT_SIGNIFICANCE, fStatistic=F_STATISTIC_MEAN, binsMode=BINS_MODE_NATIVE, workers=None,
                 trendBins=DEFAULT_TREND_BINS):
        ensure(nAcquisitions is not None and nAcquisitions >= 2, "an ensemble needs at least 2 acquisitions",
               DomainError)
        lo, hi = purityRange
        ensure(0.0 < lo <= hi < 1.0, f"thermal purity range must satisfy 0 < lo <= hi < 1, not `{purityRange}`",
               DomainError)
        ensure(states is None or (len(states) > 0 and all(isinstance(s, GaussianState) for s in states)),
               "states must be a non-empty list of GaussianState", DomainError)
        ensure(workers is None or workers >= 1, "workers must be at least 1", DomainError)
        ensure(trendBins >= 2, "trend reports need at least 2 purity bins", DomainError)

        self.nAcquisitions = int(nAcquisitions)
        self.purityRange = (float(lo), float(hi))
        self.states = list(states) if states else None
        self.detector = detector if detector is not None else DetectorModel(DEFAULT_EFFICIENCY)
        self.acquisition = acquisition if acquisition is not None else AcquisitionConfig()
        self.masterSeed = int(masterSeed)
        self.invertLoss = bool(invertLoss)
        self.alpha = alpha
        self.fStatistic = fStatistic
        self.binsMode = binsMode
        self.workers = workers
        self.trendBins = int(trendBins)

    @classmethod
    def fromDict(cls, options):
        """ Create config from a dictionary as produced by `ConfigParser.parseConfig`

        Recognized keys: `acquisitions`, `purity_range`, `states`, `efficiency`, `electronic_noise`, `bins`,
        `per_bin`, `seed`, `invert_loss`, `alpha`, `f_statistic`, `bins_mode`, `workers`, `trend_bins`.

        :raises: `DomainError` for unknown keys or invalid values
        """
        unknown = set(options) - cls._KEYS
        ensure(not unknown, f"unknown ensemble config keys: {sorted(unknown)}", DomainError)

        detector = DetectorModel(options.get("efficiency", DEFAULT_EFFICIENCY),
                                 options.get("electronic_noise", DEFAULT_ELECTRONIC_NOISE_VARIANCE))
        acquisition = AcquisitionConfig(_as_int(options.get("bins", DEFAULT_BIN_COUNT), "bins"),
                                        _as_int(options.get("per_bin", DEFAULT_SAMPLES_PER_BIN), "per_bin"))
        workers = options.get("workers")
        return cls(nAcquisitions=_as_int(options.get("acquisitions", DEFAULT_ACQUISITION_COUNT), "acquisitions"),
                   purityRange=options.get("purity_range", DEFAULT_PURITY_RANGE),
                   states=options.get("states"),
                   detector=detector,
                   acquisition=acquisition,
                   masterSeed=_as_int(options.get("seed", DEFAULT_RANDOM_SEED), "seed"),
                   invertLoss=options.get("invert_loss", True),
                   alpha=options.get("alpha", DEFAULT_SIGNIFICANCE),
                   fStatistic=options.get("f_statistic", F_STATISTIC_MEAN),
                   binsMode=options.get("bins_mode", BINS_MODE_NATIVE),
                   workers=_as_int(workers, "workers") if workers is not None else None,
                   trendBins=_as_int(options.get("trend_bins", DEFAULT_TREND_BINS), "trend_bins"))

    def stateFor(self, index):
        """ State measured in acquisition `index`"""
        if self.states:
            return self.states[index % len(self.states)]
        lo, hi = self.purityRange
        return GaussianState.thermalFromPurity(lo + (hi - lo) * index / (self.nAcquisitions - 1))

    def acquisitionFor(self, index):
        """ Acquisition config of acquisition `index`, seeded from ``(masterSeed, index)``"""
        return self.acquisition.withSeed(derive_seed(self.masterSeed, index))

    def truePurity(self, index):
        state = self.stateFor(index)
        return state.purity if self.invertLoss else state.afterLoss(self.detector.efficiency).purity

    def toDict(self):
        return {
            "acquisitions": self.nAcquisitions,
            "purity_range": list(self.purityRange),
            "states": [s.describe() for s in self.states] if self.states else None,
            "detector": self.detector.toDict(),
            "acquisition": self.acquisition.toDict(),
            "seed": self.masterSeed,
            "invert_loss": self.invertLoss,
            "alpha": self.alpha,
            "f_statistic": self.fStatistic,
            "bins_mode": self.binsMode,
            "trend_bins": self.trendBins,
        }

    def __repr__(self):
        return f"EnsembleConfig({self.toDict()})"


@dataclass(frozen=True)
class TrendReport:
    """ Dependence of one residual population on the true purity

    :param column: residual column analyzed
    :param verdict: ``systematic``, ``random`` or ``inconclusive``
    :param bins: list of ``(pi_center, mean, standard_error, count)`` per purity bin
    :param slope: least squares slope of the residual against the true purity
    :param slope_stderr: standard error of the slope
    :param slope_p: two sided p-value of a zero slope
    :param spearman_rho: rank correlation of residual and true purity
    :param abs_slope: least squares slope of the absolute residual against the true purity
    """
    column: str
    verdict: str
    bins: Tuple[Tuple[float, float, float, int], ...] = ()
    slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    slope_p: Optional[float] = None
    spearman_rho: Optional[float] = None
    abs_slope: Optional[float] = None
    note: str = ""

    @property
    def isSystematic(self):
        return self.verdict == VERDICT_SYSTEMATIC

    def toDict(self):
        return {
            "column": self.column,
            "verdict": self.verdict,
            "bins": [{"pi": c, "mean": m, "sem": s, "count": n} for c, m, s, n in self.bins],
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "slope_p": self.slope_p,
            "spearman_rho": self.spearman_rho,
            "abs_slope": self.abs_slope,
            "note": self.note,
        }


@dataclass
class ResidualSummary:
    """ Per acquisition estimates and residuals of an ensemble

    :param records: pandas DataFrame with one row per acquisition (columns `RECORD_COLUMNS`)
    :param config: the `EnsembleConfig` that produced it
    """
    records: pd.DataFrame
    config: Optional[EnsembleConfig] = None
    notes: List[str] = field(default_factory=list)

    @property
    def recordCount(self):
        return len(self.records)

    @property
    def failureCount(self):
        return int((self.records["status"] != "ok").sum())

    def residuals(self, column):
        """ Non missing values of residual `column` as numpy array"""
        ensure(column in DELTA_COLUMNS, f"residual column must be one of {DELTA_COLUMNS}", DomainError)
        return self.records[column].dropna().to_numpy(dtype=float)

    def populationStats(self, column):
        """ Mean, standard deviation, standard error and normality of one residual population"""
        values = self.residuals(column)
        n = int(values.size)
        result = {"n": n, "mean": None, "std": None, "sem": None, "shapiro_w": None, "shapiro_p": None,
                  "normal": None}
        if n >= 2:
            std = float(np.std(values, ddof=1))
            result.update(mean=float(np.mean(values)), std=std, sem=std / np.sqrt(n))
        if n >= SHAPIRO_MIN_SAMPLES and np.ptp(values) > 0:
            w, p = shapiro_wilk(subsample(values))
            alpha = self.config.alpha if self.config is not None else DEFAULT_SIGNIFICANCE
            result.update(shapiro_w=w, shapiro_p=p, normal=p >= alpha)
        return result

    def trendReports(self):
        nBins = self.config.trendBins if self.config is not None else DEFAULT_TREND_BINS
        return {column: residual_trend(self, column, nBins) for column in DELTA_COLUMNS}

    def toDict(self):
        return {
            "config": self.config.toDict() if self.config is not None else None,
            "acquisitions": self.recordCount,
            "failures": self.failureCount,
            "populations": {column: self.populationStats(column) for column in DELTA_COLUMNS},
            "trends": {column: trend.toDict() for column, trend in self.trendReports().items()},
            "notes": list(self.notes),
        }

    def toJson(self):
        return json.dumps(self.toDict(), sort_keys=True, indent=2) + "\n"

    def writeCsv(self, path):
        """ Write per acquisition records as flat CSV"""
        self.records.to_csv(path, index=False, lineterminator="\n")
        logging.getLogger(__name__).info("wrote %d acquisition records to %s", self.recordCount, path)

    def writeJson(self, path):
        """ Write the summary as JSON"""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.toJson())
        logging.getLogger(__name__).info("wrote ensemble summary to %s", path)


def residual_trend(summary, column="delta_f_gauss", nBins=DEFAULT_TREND_BINS):
    """ Binned means of a residual population against the true purity, with a trend test

    The verdict is ``systematic`` when the least squares slope differs from zero at the summary's significance
    level, ``random`` otherwise, and ``inconclusive`` for fewer than 10 usable records or no spread in purity.

    :param summary: `ResidualSummary`
    :param column: residual column
    :param nBins: number of equal width purity bins
    :returns: `TrendReport`
    """
    ensure(column in DELTA_COLUMNS, f"residual column must be one of {DELTA_COLUMNS}", DomainError)
    alpha = summary.config.alpha if summary.config is not None else DEFAULT_SIGNIFICANCE
    data = summary.records[["pi_true", column]].dropna()
    pi = data["pi_true"].to_numpy(dtype=float)
    delta = data[column].to_numpy(dtype=float)

    if pi.size < MIN_TREND_RECORDS:
        return TrendReport(column, VERDICT_INCONCLUSIVE, note=f"{pi.size} usable records, at least "
                                                              f"{MIN_TREND_RECORDS} are needed")
    if np.ptp(pi) < _MIN_PURITY_SPREAD:
        return TrendReport(column, VERDICT_INCONCLUSIVE, note="true purity does not vary across the ensemble")

    edges = np.linspace(pi.min(), pi.max(), nBins + 1)
    which = np.clip(np.digitize(pi, edges[1:-1]), 0, nBins - 1)
    bins = []
    for b in range(nBins):
        values = delta[which == b]
        if values.size == 0:
            continue
        sem = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else None
        bins.append((float(0.5 * (edges[b] + edges[b + 1])), float(np.mean(values)), sem, int(values.size)))

    fit = stats.linregress(pi, delta)
    abs_fit = stats.linregress(pi, np.abs(delta))
    rho = stats.spearmanr(pi, delta)[0]
    verdict = VERDICT_SYSTEMATIC if fit.pvalue < alpha else VERDICT_RANDOM
    return TrendReport(column, verdict, bins=tuple(bins), slope=float(fit.slope), slope_stderr=float(fit.stderr),
                       slope_p=float(fit.pvalue), spearman_rho=float(rho), abs_slope=float(abs_fit.slope))


class EnsembleRunner:
    """ Runner of simulated acquisition ensembles

    :param config: `EnsembleConfig`
    :param verbose: = if `True`, generate verbose output
    :param debug: = if set to True, output debug level of information

    Each acquisition is seeded from ``(masterSeed, index)`` and records are collected in index order, so results do
    not depend on the number of workers.
    """

    def __init__(self, config=None, verbose=False, debug=False):
        self.verbose = verbose
        self.debug = debug
        self._setupLogger()
        self._config = config if config is not None else EnsembleConfig()
        ensure(isinstance(self._config, EnsembleConfig), "config must be an EnsembleConfig", DomainError)

    def _setupLogger(self):
        """Set up logging

        This will set the logger at warning, info or debug levels depending on the instance construction parameters
        """
        self.logger = logging.getLogger("EnsembleRunner")
        if self.debug:
            self.logger.setLevel(logging.DEBUG)
        elif self.verbose:
            self.logger.setLevel(logging.INFO)
        else:
            self.logger.setLevel(logging.WARNING)

    @property
    def config(self):
        return self._config

    def withConfig(self, config):
        new_copy = copy.copy(self)
        new_copy._config = config
        return new_copy

    def runAcquisition(self, index) -> Dict:
        """ Simulate and analyze acquisition `index`

        Analysis failures are returned as a record with status other than ``ok``.
        """
        cfg = self._config
        acquisition = cfg.acquisitionFor(index)
        record = {column: np.nan for column in RECORD_COLUMNS}
        record.update(index=index, seed=str(acquisition.seed), status="ok", pi_true=cfg.truePurity(index))
        try:
            series = HomodyneSimulator(cfg.stateFor(index), cfg.detector, acquisition).build()
            analyzer = HomodyneAnalyzer(series, efficiency=cfg.detector.efficiency if cfg.invertLoss else None,
                                        binsMode=cfg.binsMode, fStatistic=cfg.fStatistic, alpha=cfg.alpha)
            purity = analyzer.analyze().purityReport
        except PurimeterError as e:
            self.logger.warning("acquisition %d failed: %s", index, e.msg)
            record["status"] = f"error: {e.msg}"
            return record

        record.update(pi_f=purity.pi_f_approx, pi_f_exact=purity.pi_f_exact, f_mean=purity.f_mean,
                      f_min=purity.f_min)
        record["delta_f_true"] = relative_difference(purity.pi_f_approx, record["pi_true"])
        if purity.pi_gauss is not None:
            record["pi_gauss"] = purity.pi_gauss
            record["delta_gauss_true"] = relative_difference(purity.pi_gauss, record["pi_true"])
            record["delta_f_gauss"] = relative_difference(purity.pi_f_approx, purity.pi_gauss)
        self.logger.debug("acquisition %d: pi_true=%.5f pi_f=%.5f", index, record["pi_true"], purity.pi_f_approx)
        return record

    def run(self):
        """ Run all acquisitions

        :returns: `ResidualSummary`
        :raises: `EnsembleError` if more than 10% of the acquisitions fail
        """
        cfg = self._config
        indices = range(cfg.nAcquisitions)
        self.logger.info("running %d acquisitions (seed %d, workers %s)", cfg.nAcquisitions, cfg.masterSeed,
                         cfg.workers)
        if cfg.workers is not None and cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
                records = list(executor.map(self.runAcquisition, indices))
        else:
            records = [self.runAcquisition(index) for index in indices]

        summary = ResidualSummary(pd.DataFrame(records, columns=RECORD_COLUMNS), config=cfg)
        failures = summary.failureCount
        if failures > MAX_FAILURE_FRACTION * cfg.nAcquisitions:
            raise EnsembleError(f"{failures} of {cfg.nAcquisitions} acquisitions failed, more than "
                                f"{MAX_FAILURE_FRACTION:.0%}")
        if failures:
            summary.notes.append(f"{failures} of {cfg.nAcquisitions} acquisitions failed and are excluded")
        return summary

    def explain(self, suppressOutput=False):
        """Explain the ensemble

        :param suppressOutput: If True, suppress display of explanation
        :returns: String containing explanation of the ensemble
        """
        cfg = self._config
        family = (f"{len(cfg.states)} explicit states" if cfg.states
                  else f"thermal states, purity {cfg.purityRange[0]} to {cfg.purityRange[1]}")
        output = ["",
                  "Ensemble", "========",
                  f"acquisitions: {cfg.nAcquisitions}",
                  f"state family: {family}",
                  f"detector: {cfg.detector}",
                  f"acquisition: {cfg.acquisition}",
                  f"master seed: {cfg.masterSeed}",
                  f"loss inversion: {cfg.invertLoss}",
                  ""]

        explain_results = "\n".join(output)
        if not suppressOutput:
            print(explain_results)

        return explain_results


def run_ensemble(cfg, verbose=False):
    """ Run an ensemble of acquisitions

    :param cfg: `EnsembleConfig`
    :returns: `ResidualSummary`
    """
    return EnsembleRunner(cfg, verbose=verbose).run()
