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
This module defines the ``HomodyneAnalyzer`` class and the ``AnalysisReport`` it produces

The analysis pipeline for a record is: optional rebinning, per bin normality checks, per bin moments, optional
loss inversion, the uncertainty function over theta, optional shot noise baseline subtraction and finally the
purity, temperature and mean photon number estimators.
"""

import copy
import json
import logging

from ._version import __version__
from .estimators import estimate_purity
from .gaussianity import series_normality
from .purimeter_constants import (BINS_MODES, BINS_MODE_NATIVE, F_STATISTIC_MEAN, DEFAULT_SIGNIFICANCE,
                                  TEMP_CONVENTIONS, TEMP_CONVENTION_BOTH, TEMP_CONVENTION_EQ, TEMP_CONVENTION_TABLE,
                                  TABLE_TEMPERATURE_FACTOR, REPORT_SCHEMA_VERSION)
from .simulator import PhaseBinnedSeries
from .tomographic_stats import bin_moments, invert_loss, f_of_theta, subtract_baseline
from .utils import ensure, DomainError, json_value_from_path

_TEMPERATURE_NOTE = (f"`eq` is 1 / (2 atanh(pi_f)); `table` is {TABLE_TEMPERATURE_FACTOR:g} times larger, matching "
                     "the tabulated reference values")


class AnalysisReport:
    """ Schema versioned result of analyzing one record

    Top level keys are ``schema``, ``meta``, ``profile``, ``purity``, ``normality`` and ``temperature``.

    :param document: report content as nested dictionary
    :param purityReport: the `PurityReport` the document was built from, if available
    :param profile: the `UncertaintyProfile` the document was built from, if available
    """

    def __init__(self, document, purityReport=None, profile=None):
        ensure(document is not None and document.get("schema") == REPORT_SCHEMA_VERSION,
               f"report document must carry schema {REPORT_SCHEMA_VERSION}", DomainError)
        self._document = document
        self._purityReport = purityReport
        self._profile = profile

    @property
    def purityReport(self):
        return self._purityReport

    @property
    def profile(self):
        return self._profile

    def toDict(self):
        """ Return a deep copy of the report document"""
        return copy.deepcopy(self._document)

    def toJson(self):
        """ Serialize the report with sorted keys, so that equal reports serialize to identical text"""
        return json.dumps(self._document, sort_keys=True, indent=2) + "\n"

    @classmethod
    def fromJson(cls, text):
        return cls(json.loads(text))

    def valueAt(self, searchPath, defaultValue=None):
        """ Extract a value with a `jmespath` expression, e.g. ``purity.pi_f``

        :param searchPath: `jmespath` search path
        :param defaultValue: value returned when the path does not match
        """
        return json_value_from_path(searchPath, self._document, defaultValue)

    def __getitem__(self, key):
        return self._document[key]

    def __eq__(self, other):
        return isinstance(other, AnalysisReport) and self.toJson() == other.toJson()

    __hash__ = None

    def __repr__(self):
        return f"AnalysisReport(pi_f={self.valueAt('purity.pi_f')}, pi_gauss={self.valueAt('purity.pi_gauss')})"


class HomodyneAnalyzer:
    """ Analyzer of phase binned homodyne records

    :param series: `PhaseBinnedSeries` to analyze
    :param shot: optional shot noise `PhaseBinnedSeries` whose theta averaged F is subtracted as baseline
    :param efficiency: optional detector efficiency; when given, per bin statistics are loss inverted
    :param binsMode: ``native`` keeps the bins of the record, ``grid48`` / ``paper47`` rebin to 48 / 47 bins
    :param fStatistic: ``mean`` or ``min``, the F statistic used by the estimators
    :param alpha: significance level of the normality checks
    :param tempConvention: ``eq``, ``table`` or ``both``
    :param frequencyHz: optional mode frequency for Kelvin temperatures
    :param provenance: optional dictionary (input path, seed ...) copied into the report metadata
    :param verbose: = if `True`, generate verbose output
    :param debug: = if set to True, output debug level of information
    """

    def __init__(self, series, shot=None, efficiency=None, binsMode=BINS_MODE_NATIVE, fStatistic=F_STATISTIC_MEAN,
                 alpha=DEFAULT_SIGNIFICANCE, tempConvention=TEMP_CONVENTION_BOTH, frequencyHz=None,
                 provenance=None, verbose=False, debug=False):
        self.verbose = verbose
        self.debug = debug
        self._setupLogger()

        ensure(isinstance(series, PhaseBinnedSeries), "series must be a PhaseBinnedSeries", DomainError)
        ensure(shot is None or isinstance(shot, PhaseBinnedSeries), "shot must be a PhaseBinnedSeries",
               DomainError)
        ensure(binsMode in BINS_MODES, f"bins mode must be one of {sorted(BINS_MODES)}, not `{binsMode}`",
               DomainError)
        ensure(tempConvention in TEMP_CONVENTIONS,
               f"temperature convention must be one of {TEMP_CONVENTIONS}, not `{tempConvention}`", DomainError)
        ensure(efficiency is None or 0.0 < efficiency <= 1.0,
               f"quantum efficiency must be in (0, 1], not `{efficiency}`", DomainError)

        self._series = series
        self._shot = shot
        self._efficiency = efficiency
        self._binsMode = binsMode
        self._fStatistic = fStatistic
        self._alpha = alpha
        self._tempConvention = tempConvention
        self._frequencyHz = frequencyHz
        self._provenance = dict(provenance) if provenance else {}

    def _setupLogger(self):
        """Set up logging

        This will set the logger at warning, info or debug levels depending on the instance construction parameters
        """
        self.logger = logging.getLogger("HomodyneAnalyzer")
        if self.debug:
            self.logger.setLevel(logging.DEBUG)
        elif self.verbose:
            self.logger.setLevel(logging.INFO)
        else:
            self.logger.setLevel(logging.WARNING)

    def _copyWith(self, **changes):
        new_copy = copy.copy(self)
        for key, value in changes.items():
            setattr(new_copy, key, value)
        return new_copy

    def withShotNoise(self, shot):
        """ Return copy of analyzer that subtracts the baseline of `shot`"""
        return self._copyWith(_shot=shot)

    def withEfficiency(self, efficiency):
        """ Return copy of analyzer that inverts losses of a detector with `efficiency`"""
        return self._copyWith(_efficiency=efficiency)

    def withBinsMode(self, binsMode):
        ensure(binsMode in BINS_MODES, f"bins mode must be one of {sorted(BINS_MODES)}", DomainError)
        return self._copyWith(_binsMode=binsMode)

    def withFStatistic(self, fStatistic):
        return self._copyWith(_fStatistic=fStatistic)

    def _prepared(self, series):
        n_bins = BINS_MODES[self._binsMode]
        if n_bins is None or series is None:
            return series
        self.logger.info("rebinning %d bins to %d", series.binCount, n_bins)
        return series.rebinned(n_bins)

    def _statistics(self, series):
        stats = bin_moments(series)
        if self._efficiency is not None:
            stats = invert_loss(stats, self._efficiency)
        return stats

    def _temperatureSection(self, purity):
        section = {"convention": self._tempConvention, "label": purity.temperature_label,
                   "factor": TABLE_TEMPERATURE_FACTOR, "note": _TEMPERATURE_NOTE}
        conventions = {TEMP_CONVENTION_EQ: purity.temperature, TEMP_CONVENTION_TABLE: purity.temperature_table}
        for name, scale in conventions.items():
            if self._tempConvention not in (name, TEMP_CONVENTION_BOTH):
                continue
            section[name] = scale.value if scale is not None else None
            if scale is not None and scale.omega is not None:
                section[f"{name}_kelvin"] = scale.kelvin()
        return section

    def analyze(self):
        """ Run the analysis pipeline

        :returns: `AnalysisReport`
        :raises: `DomainError` if a bin has fewer than 2 samples or rebinning leaves a bin empty
        """
        series = self._prepared(self._series)
        shot = self._prepared(self._shot)
        self.logger.info("analyzing %d samples in %d bins", series.sampleCount, series.binCount)

        normality = series_normality(series, self._alpha)
        stats = self._statistics(series)
        profile = f_of_theta(stats)
        self.logger.debug("uncertainty function: f_min=%.6f f_mean=%.6f f_std=%.6f", profile.f_min,
                          profile.f_mean, profile.f_std)

        if shot is not None:
            shot_profile = f_of_theta(self._statistics(shot))
            profile = subtract_baseline(profile, shot_profile)
            self.logger.info("subtracted shot noise baseline %.6f", profile.baseline)

        purity = estimate_purity(profile, stats, f_statistic=self._fStatistic, frequencyHz=self._frequencyHz)
        purity.diagnostics.extend(normality.notes)

        counts = series.sampleCounts
        meta = {
            "version": __version__,
            "bin_count": series.binCount,
            "sample_count": series.sampleCount,
            "samples_per_bin_min": int(min(counts)),
            "samples_per_bin_max": int(max(counts)),
            "bins_mode": self._binsMode,
            "efficiency": self._efficiency,
            "loss_inverted": self._efficiency is not None,
            "f_statistic": self._fStatistic,
            "alpha": self._alpha,
            "baseline": {
                "subtracted": profile.baseline_subtracted,
                "value": profile.baseline,
                "shot_sample_count": shot.sampleCount if shot is not None else None,
            },
            "provenance": self._provenance,
        }
        profile_section = profile.toDict()
        profile_section["flatness"] = profile.flatness if profile.f_mean != 0 else None

        document = {
            "schema": REPORT_SCHEMA_VERSION,
            "meta": meta,
            "profile": profile_section,
            "purity": purity.toDict(),
            "normality": normality.toDict(),
            "temperature": self._temperatureSection(purity),
        }
        return AnalysisReport(document, purityReport=purity, profile=profile)

    def explain(self, suppressOutput=False):
        """Explain the analysis settings

        :param suppressOutput: If True, suppress display of explanation
        :returns: String containing explanation of the analysis
        """
        output = ["",
                  "Homodyne analysis", "=================",
                  f"record: {self._series}",
                  f"shot noise record: {self._shot}",
                  f"bins mode: {self._binsMode}",
                  f"loss inversion efficiency: {self._efficiency}",
                  f"F statistic: {self._fStatistic}",
                  f"normality significance: {self._alpha}",
                  f"temperature convention: {self._tempConvention}",
                  ""]

        explain_results = "\n".join(output)
        if not suppressOutput:
            print(explain_results)

        return explain_results


def analyze_series(series, shot=None, **options):
    """ Analyze a record with `HomodyneAnalyzer`

    :param series: `PhaseBinnedSeries`
    :param shot: optional shot noise `PhaseBinnedSeries`
    :param options: further `HomodyneAnalyzer` keyword arguments
    :returns: `AnalysisReport`
    """
    return HomodyneAnalyzer(series, shot=shot, **options).analyze()
