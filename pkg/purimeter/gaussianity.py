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
This file defines the normality checks applied to the quadrature samples of each phase bin

Two indicators are computed per bin: the kurtosis excess ``m4 / m2**2 - 3`` and the Shapiro-Wilk statistic with its
p-value (Royston's algorithm, as implemented by `scipy.stats.shapiro`).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from .purimeter_constants import (DEFAULT_SIGNIFICANCE, SHAPIRO_MIN_SAMPLES, SHAPIRO_MAX_SAMPLES,
                                  KURTOSIS_MIN_SAMPLES, TIE_FRACTION_TOLERANCE)
from .utils import ensure, DomainError


def _as_samples(samples, minimum):
    values = np.asarray(samples, dtype=float).ravel()
    ensure(values.size >= minimum, f"at least {minimum} samples are required, got {values.size}", DomainError)
    ensure(np.isfinite(values).all(), "samples must be finite", DomainError)
    ensure(np.ptp(values) > 0, "samples are degenerate (zero variance)", DomainError)
    return values


def kurtosis_excess(samples):
    """ Kurtosis excess ``m4 / m2**2 - 3`` from the central sample moments

    :param samples: at least 4 finite values
    :returns: kurtosis excess, 0 for a normal distribution
    :raises: `DomainError` for fewer than 4 samples or zero variance
    """
    values = _as_samples(samples, KURTOSIS_MIN_SAMPLES)
    return float(stats.kurtosis(values, fisher=True, bias=True))


def tie_fraction(samples):
    """ Fraction of samples that repeat an earlier value"""
    values = np.asarray(samples, dtype=float).ravel()
    return 1.0 - np.unique(values).size / values.size if values.size else 0.0


def shapiro_wilk(samples):
    """ Shapiro-Wilk normality test

    :param samples: between 12 and 5000 finite values
    :returns: tuple of ``(w, p)``; small `p` is evidence against normality
    :raises: `DomainError` if the sample count is outside the validity range; subsample larger records first
    """
    values = np.asarray(samples, dtype=float).ravel()
    ensure(SHAPIRO_MIN_SAMPLES <= values.size <= SHAPIRO_MAX_SAMPLES,
           f"Shapiro-Wilk test requires {SHAPIRO_MIN_SAMPLES} to {SHAPIRO_MAX_SAMPLES} samples, got {values.size}; "
           "subsample the data", DomainError)
    values = _as_samples(values, SHAPIRO_MIN_SAMPLES)
    w, p = stats.shapiro(values)
    return float(w), float(p)


def subsample(samples, maxCount=SHAPIRO_MAX_SAMPLES):
    """ Deterministic, evenly strided subsample of at most `maxCount` values"""
    values = np.asarray(samples, dtype=float).ravel()
    if values.size <= maxCount:
        return values
    indices = np.linspace(0, values.size - 1, maxCount).round().astype(int)
    return values[indices]


@dataclass(frozen=True)
class NormalityResult:
    """ Normality indicators of one sample

    Bins with fewer than 12 samples are too small for the Shapiro-Wilk test; their `shapiro_w`, `shapiro_p` and
    `passed` are None. The kurtosis excess is None below 4 samples or for degenerate samples.

    :param kurtosis_excess: kurtosis excess
    :param shapiro_w: Shapiro-Wilk statistic in (0, 1]
    :param shapiro_p: Shapiro-Wilk p-value in [0, 1]
    :param n: sample count
    :param alpha: significance level of `passed`
    :param tested_n: number of samples entering the Shapiro-Wilk test after subsampling, 0 if not tested
    :param notes: warnings such as excessive ties
    """
    kurtosis_excess: Optional[float]
    shapiro_w: Optional[float]
    shapiro_p: Optional[float]
    n: int
    alpha: float = DEFAULT_SIGNIFICANCE
    tested_n: int = 0
    notes: Tuple[str, ...] = ()

    @property
    def tested(self):
        return self.shapiro_p is not None

    def verdictAt(self, alpha):
        """ True if normality is not rejected at significance level `alpha`, None if the sample was not tested"""
        return self.shapiro_p >= alpha if self.tested else None

    @property
    def passed(self):
        return self.verdictAt(self.alpha)

    def toDict(self):
        return {
            "kurtosis_excess": self.kurtosis_excess,
            "shapiro_w": self.shapiro_w,
            "shapiro_p": self.shapiro_p,
            "n": self.n,
            "tested_n": self.tested_n,
            "passed": self.passed,
            "notes": list(self.notes),
        }


def test_normality(samples, alpha=DEFAULT_SIGNIFICANCE):
    """ Compute both normality indicators for one sample

    Samples beyond the Shapiro-Wilk validity range are subsampled deterministically for that test only; samples
    below it are not tested and only their kurtosis is reported.

    :param samples: finite values
    :param alpha: significance level
    :returns: `NormalityResult`
    """
    ensure(0.0 < alpha < 1.0, f"significance level must be in (0, 1), not `{alpha}`", DomainError)
    values = np.asarray(samples, dtype=float).ravel()
    ensure(np.isfinite(values).all(), "samples must be finite", DomainError)
    varies = values.size > 0 and np.ptp(values) > 0
    kurtosis = kurtosis_excess(values) if values.size >= KURTOSIS_MIN_SAMPLES and varies else None

    notes = []
    if values.size < SHAPIRO_MIN_SAMPLES:
        notes.append(f"{values.size} samples are too few for the Shapiro-Wilk test (at least {SHAPIRO_MIN_SAMPLES})")
    elif not varies:
        notes.append("samples are degenerate (zero variance)")
    if notes:
        return NormalityResult(kurtosis_excess=kurtosis, shapiro_w=None, shapiro_p=None, n=int(values.size),
                               alpha=alpha, notes=tuple(notes))

    tested = subsample(values)
    w, p = shapiro_wilk(tested)
    ties = tie_fraction(values)
    if ties > TIE_FRACTION_TOLERANCE:
        notes.append(f"{ties:.1%} of samples are tied; the Shapiro-Wilk p-value may be unreliable")
    if tested.size < values.size:
        notes.append(f"Shapiro-Wilk test used {tested.size} of {values.size} samples")

    return NormalityResult(kurtosis_excess=kurtosis, shapiro_w=w, shapiro_p=p, n=int(values.size),
                           alpha=alpha, tested_n=int(tested.size), notes=tuple(notes))


# not a test function
test_normality.__test__ = False


@dataclass
class NormalitySummary:
    """ Normality results of all phase bins of a record

    The record passes when the number of rejected bins is compatible with the false rejection rate `alpha`,
    judged by a one sided binomial test at the same level over the bins that could be tested. With no testable
    bin the verdict is None.

    :param results: list of ``(theta, NormalityResult)`` pairs
    :param alpha: significance level
    """
    results: List[Tuple[float, NormalityResult]]
    alpha: float = DEFAULT_SIGNIFICANCE
    notes: List[str] = field(default_factory=list)

    @property
    def testedCount(self):
        return sum(1 for _, r in self.results if r.tested)

    @property
    def rejectedThetas(self):
        return [theta for theta, r in self.results if r.passed is False]

    @property
    def rejectionCount(self):
        return len(self.rejectedThetas)

    @property
    def binomialPValue(self):
        """ Probability of at least this many rejections among normal bins"""
        n_tested = self.testedCount
        return float(stats.binom.sf(self.rejectionCount - 1, n_tested, self.alpha)) if n_tested else 1.0

    @property
    def passed(self):
        return self.binomialPValue >= self.alpha if self.testedCount else None

    @property
    def minShapiroP(self):
        return min((r.shapiro_p for _, r in self.results if r.tested), default=None)

    @property
    def meanKurtosisExcess(self):
        values = [r.kurtosis_excess for _, r in self.results if r.kurtosis_excess is not None]
        return float(np.mean(values)) if values else None

    def toDict(self, includeBins=True):
        result = {
            "alpha": self.alpha,
            "bins_tested": self.testedCount,
            "bins_untested": len(self.results) - self.testedCount,
            "bins_rejected": self.rejectionCount,
            "binomial_p": self.binomialPValue,
            "min_shapiro_p": self.minShapiroP,
            "mean_kurtosis_excess": self.meanKurtosisExcess,
            "passed": self.passed,
            "notes": list(self.notes),
        }
        if includeBins:
            result["bins"] = [dict(theta=theta, **r.toDict()) for theta, r in self.results]
        return result


def series_normality(series, alpha=DEFAULT_SIGNIFICANCE):
    """ Run `test_normality` on every bin of a record

    Rejection is reported, not raised; the caller decides whether to proceed. Bins too small for the Shapiro-Wilk
    test are reported as untested.

    :param series: `PhaseBinnedSeries`
    :param alpha: significance level
    :returns: `NormalitySummary`
    """
    logger = logging.getLogger(__name__)
    summary = NormalitySummary(results=[(theta, test_normality(samples, alpha)) for theta, samples in series.bins],
                               alpha=alpha)
    for theta, result in summary.results:
        for note in result.notes:
            if "tied" in note:
                summary.notes.append(f"theta={theta:.6f}: {note}")

    untested = len(summary.results) - summary.testedCount
    if untested:
        note = (f"Shapiro-Wilk test skipped in {untested} of {len(summary.results)} bins (fewer than "
                f"{SHAPIRO_MIN_SAMPLES} samples or zero variance)")
        logger.info(note)
        summary.notes.append(note)
    if summary.passed is False:
        note = (f"normality rejected in {summary.rejectionCount} of {summary.testedCount} tested bins at "
                f"alpha={alpha} (binomial p={summary.binomialPValue:.3g})")
        logger.warning(note)
        summary.notes.append(note)
    return summary
