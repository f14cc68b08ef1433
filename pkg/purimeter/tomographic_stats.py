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
This file defines the per phase moment statistics of a homodyne record and the tomographic uncertainty function

The uncertainty function at local oscillator phase `theta` is

``F(theta) = s(theta) * s(theta + pi/2) - [s(theta + pi/4) - (s(theta) + s(theta + pi/2)) / 2]**2 - 1/4``

where ``s`` is the quadrature variance. It equals the determinant of the covariance matrix in the quadrature frame
rotated by `theta`, less 1/4, so it is non-negative for every physical state.

Variances between bin centers are obtained by linear interpolation, using ``s(theta + pi) = s(theta)``.
"""

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .gaussian_state import CovarianceMatrix
from .purimeter_constants import VACUUM_VARIANCE, MIN_SAMPLES_PER_BIN
from .utils import ensure, DomainError

_QUARTER_TURN = math.pi / 2.0
_EIGHTH_TURN = math.pi / 4.0


@dataclass(frozen=True)
class QuadratureStats:
    """ Moments of the quadrature samples recorded in one phase bin

    :param theta: bin center in radians
    :param mean: sample mean
    :param variance: unbiased sample variance (divisor ``n - 1``)
    :param count: number of samples
    """
    theta: float
    mean: float
    variance: float
    count: int

    def __post_init__(self):
        ensure(self.count >= MIN_SAMPLES_PER_BIN,
               f"at least {MIN_SAMPLES_PER_BIN} samples are needed for a variance, bin at theta={self.theta:.6f} "
               f"has {self.count}", DomainError)
        ensure(self.variance >= 0, f"variance must be non-negative, not `{self.variance}`", DomainError)

    @property
    def secondMoment(self):
        """ Raw second moment ``variance + mean**2``"""
        return self.variance + self.mean ** 2


@dataclass(frozen=True)
class UncertaintyProfile:
    """ Tomographic uncertainty function evaluated at the bin centers of a record

    :param points: tuple of ``(theta, f_value)`` pairs
    :param f_min: minimum of the f values
    :param f_mean: mean of the f values over theta
    :param f_std: standard deviation of the f values over theta
    :param baseline_subtracted: True once the shot noise baseline has been subtracted
    :param baseline: value that was subtracted, 0 if none
    """
    points: Tuple[Tuple[float, float], ...]
    f_min: float
    f_mean: float
    f_std: float
    baseline_subtracted: bool = False
    baseline: float = 0.0

    @classmethod
    def fromPoints(cls, thetas, values, baseline_subtracted=False, baseline=0.0):
        """ Build profile and its summary statistics from parallel sequences of phases and f values"""
        values = np.asarray(values, dtype=float)
        ensure(values.size > 0, "an uncertainty profile needs at least one point", DomainError)
        points = tuple((float(t), float(f)) for t, f in zip(thetas, values))
        return cls(points=points,
                   f_min=float(np.min(values)),
                   f_mean=float(np.mean(values)),
                   f_std=float(np.std(values)),
                   baseline_subtracted=baseline_subtracted,
                   baseline=float(baseline))

    @property
    def thetas(self):
        """ Return phases as numpy array"""
        return np.array([t for t, _ in self.points])

    @property
    def values(self):
        """ Return f values as numpy array"""
        return np.array([f for _, f in self.points])

    @property
    def flatness(self):
        """ Relative spread ``f_std / |f_mean|`` (infinite when the mean vanishes)"""
        return self.f_std / abs(self.f_mean) if self.f_mean != 0 else math.inf

    def toDict(self, includePoints=True):
        """ Return profile as dictionary

        :param includePoints: if False only the summary statistics are returned
        """
        result = {
            "f_min": self.f_min,
            "f_mean": self.f_mean,
            "f_std": self.f_std,
            "baseline_subtracted": self.baseline_subtracted,
            "baseline": self.baseline,
        }
        if includePoints:
            result["points"] = [{"theta": t, "f": f} for t, f in self.points]
        return result


def bin_moments(series):
    """ Mean and unbiased variance of the samples in each bin of a record

    :param series: `PhaseBinnedSeries`
    :returns: list of `QuadratureStats`, one per bin
    :raises: `DomainError` if a bin has fewer than 2 samples
    """
    results = []
    for theta, samples in series.bins:
        ensure(samples.size >= MIN_SAMPLES_PER_BIN,
               f"bin at theta={theta:.6f} has {samples.size} samples, at least {MIN_SAMPLES_PER_BIN} are needed",
               DomainError)
        results.append(QuadratureStats(theta=theta,
                                       mean=float(np.mean(samples)),
                                       variance=float(np.var(samples, ddof=1)),
                                       count=int(samples.size)))
    return results


def _periodic_interpolate(thetas, values, query):
    """ Linear interpolation of a pi-periodic profile sampled at `thetas`

    Queries that coincide with a sample phase return the sampled value exactly.
    """
    order = np.argsort(thetas)
    t = np.asarray(thetas, dtype=float)[order]
    v = np.asarray(values, dtype=float)[order]

    q = np.mod(np.asarray(query, dtype=float), math.pi)
    if t.size == 1:
        return np.full_like(q, v[0]) if q.ndim else float(v[0])

    # wraparound neighbours on each side
    t_ext = np.concatenate(([t[-1] - math.pi], t, [t[0] + math.pi]))
    v_ext = np.concatenate(([v[-1]], v, [v[0]]))
    result = np.interp(q, t_ext, v_ext)

    idx = np.clip(np.searchsorted(t, q), 0, t.size - 1)
    exact = t[idx] == q
    result = np.where(exact, v[idx], result)
    return result if result.ndim else float(result)


def _check_stats(stats):
    ensure(stats is not None and len(stats) > 0, "quadrature statistics must not be empty", DomainError)


def variance_at(stats, theta):
    """ Quadrature variance at phase `theta`, interpolated between bin centers

    :param stats: list of `QuadratureStats` covering ``[0, pi)``
    :param theta: phase in radians (scalar or numpy array); any real value, reduced modulo pi
    :returns: interpolated variance
    :raises: `DomainError` if `stats` is empty
    """
    _check_stats(stats)
    return _periodic_interpolate([s.theta for s in stats], [s.variance for s in stats], theta)


def second_moment_at(stats, theta):
    """ Raw second moment ``<X(theta)**2>`` interpolated between bin centers

    The raw second moment is pi-periodic, whereas the mean changes sign under ``theta -> theta + pi``.
    """
    _check_stats(stats)
    return _periodic_interpolate([s.theta for s in stats], [s.secondMoment for s in stats], theta)


def uncertainty_from_variances(s0, s45, s90):
    """ Tomographic uncertainty function from the variances at ``theta``, ``theta + pi/4``, ``theta + pi/2``"""
    return s0 * s90 - (s45 - 0.5 * (s0 + s90)) ** 2 - 0.25


def f_of_theta(stats):
    """ Tomographic uncertainty function at every bin center

    :param stats: list of `QuadratureStats` covering ``[0, pi)``
    :returns: `UncertaintyProfile`
    """
    _check_stats(stats)
    thetas = np.array([s.theta for s in stats])
    s0 = variance_at(stats, thetas)
    s45 = variance_at(stats, thetas + _EIGHTH_TURN)
    s90 = variance_at(stats, thetas + _QUARTER_TURN)
    return UncertaintyProfile.fromPoints(thetas, uncertainty_from_variances(s0, s45, s90))


def subtract_baseline(profile, shot):
    """ Subtract the theta averaged uncertainty function of a shot noise record

    :param profile: `UncertaintyProfile` of the signal record
    :param shot: `UncertaintyProfile` of a vacuum (blocked input) record
    :returns: new `UncertaintyProfile` with ``baseline_subtracted = True``
    :raises: `DomainError` if the baseline was already subtracted from `profile`
    """
    ensure(not profile.baseline_subtracted, "shot noise baseline has already been subtracted", DomainError)
    baseline = shot.f_mean
    return UncertaintyProfile.fromPoints(profile.thetas, profile.values - baseline,
                                         baseline_subtracted=True, baseline=baseline)


def invert_loss(stats, efficiency):
    """ Undo detection losses on per bin statistics

    Variances map as ``s -> (s - (1 - eta) / 2) / eta`` and means as ``m -> m / sqrt(eta)``.

    :param stats: list of `QuadratureStats` of the detected record
    :param efficiency: detector quantum efficiency in (0, 1]
    :returns: list of `QuadratureStats` of the source state
    """
    ensure(efficiency is not None and 0.0 < efficiency <= 1.0,
           f"quantum efficiency must be in (0, 1], not `{efficiency}`", DomainError)
    admixture = (1.0 - efficiency) * VACUUM_VARIANCE
    scale = math.sqrt(efficiency)
    return [replace(s, mean=s.mean / scale, variance=(s.variance - admixture) / efficiency) for s in stats]


def covariance_from_three_angles(stats, efficiency=None):
    """ Covariance matrix from the variances at phases 0, pi/4 and pi/2

    ``sigma_qq = s(0)``, ``sigma_pp = s(pi/2)``, ``sigma_pq = s(pi/4) - (s(0) + s(pi/2)) / 2``

    Without `efficiency` this is the covariance of the detected (effective) state; with it, the loss map
    is inverted to give the source covariance.

    :param stats: list of `QuadratureStats`
    :param efficiency: optional detector efficiency for loss inversion
    :returns: `CovarianceMatrix`
    """
    _check_stats(stats)
    s0 = variance_at(stats, 0.0)
    s45 = variance_at(stats, _EIGHTH_TURN)
    s90 = variance_at(stats, _QUARTER_TURN)
    cov = CovarianceMatrix(s0, s90, s45 - 0.5 * (s0 + s90))
    return cov.withLossInverted(efficiency) if efficiency is not None else cov


def covariance_from_profile(stats, efficiency=None):
    """ Least squares covariance matrix from the variances of all bins

    Fits ``s(theta) = a + b * cos(2 theta) + c * sin(2 theta)``, giving ``sigma_qq = a + b``,
    ``sigma_pp = a - b`` and ``sigma_pq = c``. Noiseless variances are reproduced exactly, whereas
    `covariance_from_three_angles` interpolates between bin centers.

    :param stats: list of `QuadratureStats` with at least 3 distinct phases
    :param efficiency: optional detector efficiency for loss inversion
    :returns: `CovarianceMatrix`
    """
    _check_stats(stats)
    ensure(len(stats) >= 3, "a covariance fit needs at least 3 phase bins", DomainError)
    thetas = np.array([s.theta for s in stats])
    variances = np.array([s.variance for s in stats])
    design = np.column_stack([np.ones_like(thetas), np.cos(2 * thetas), np.sin(2 * thetas)])
    (a, b, c), _, rank, _ = np.linalg.lstsq(design, variances, rcond=None)
    ensure(rank == 3, "phase bins do not determine the covariance matrix", DomainError)
    cov = CovarianceMatrix(float(a + b), float(a - b), float(c))
    return cov.withLossInverted(efficiency) if efficiency is not None else cov


def mean_photon_from_stats(stats):
    """ Mean photon number ``(<X(0)**2> + <X(pi/2)**2> - 1) / 2`` from raw second moments

    :param stats: list of `QuadratureStats`
    :returns: mean photon number
    """
    _check_stats(stats)
    return 0.5 * (second_moment_at(stats, 0.0) + second_moment_at(stats, _QUARTER_TURN) - 1.0)
