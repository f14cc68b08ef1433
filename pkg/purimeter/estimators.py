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
This file defines the estimators of purity, temperature and mean photon number from the uncertainty function

The estimators assume that the purity bound is saturated, i.e. ``F = (Phi(pi)**2 - 1) / 4``. Inverting the smooth
form of the bound gives

``pi(F) = 2 sqrt(1 + 4F) / (2 + 9F)``

and for thermal states ``T = 1 / (2 atanh(pi))`` and ``<n> = (1 - pi) / (2 pi) = (2 + 9F) / (4 sqrt(1 + 4F)) - 1/2``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import optimize

from .bounds import f_bound, locate_piece
from .gaussian_state import TemperatureScale, purity_gaussian, temperature_from_purity
from .purimeter_constants import (F_STATISTIC_MEAN, F_STATISTIC_MIN, TABLE_TEMPERATURE_FACTOR,
                                  PURITY_BISECTION_TOLERANCE, APPROXIMATION_RELATIVE_TOLERANCE,
                                  ISOTROPY_SIGMA_MULTIPLE)
from .tomographic_stats import covariance_from_profile, covariance_from_three_angles, mean_photon_from_stats
from .utils import ensure, DomainError, PureStateError, relative_difference

_F_STATISTICS = (F_STATISTIC_MEAN, F_STATISTIC_MIN)
_SMALLEST_BRACKET = 1e-12


def _check_f(f):
    ensure(f is not None and np.isfinite(f) and f >= 0, f"uncertainty function value must be >= 0, not `{f}`",
           DomainError)


def purity_from_f(f):
    """ Purity estimate ``2 sqrt(1 + 4F) / (2 + 9F)`` from the uncertainty function

    :param f: uncertainty function value, non-negative
    :returns: purity in (0, 1]
    :raises: `DomainError` if `f` is negative; clamp small negative fluctuations before calling
    """
    _check_f(f)
    return 2.0 * math.sqrt(1.0 + 4.0 * f) / (2.0 + 9.0 * f)


def purity_from_f_exact(f):
    """ Purity at which the piecewise bound equals `f`, found by bisection

    :param f: uncertainty function value, non-negative
    :returns: purity in (0, 1]
    """
    _check_f(f)
    if f == 0:
        return 1.0

    def excess(pi):
        return f_bound(pi, exact=True) - f

    lower = 0.5
    while excess(lower) <= 0:
        lower /= 2.0
        ensure(lower > _SMALLEST_BRACKET, f"cannot bracket the purity for f = {f}", DomainError)
    return optimize.bisect(excess, lower, 1.0, xtol=PURITY_BISECTION_TOLERANCE)


def temperature_from_f(f):
    """ Temperature ``1 / (2 atanh(pi(F)))`` of the thermal state matching `f`

    :param f: uncertainty function value, non-negative
    :returns: `TemperatureScale`
    :raises: `PureStateError` for ``f = 0``, where the temperature is zero
    """
    _check_f(f)
    if f == 0:
        raise PureStateError("F = 0 corresponds to a pure state at zero temperature")
    return temperature_from_purity(purity_from_f(f))


def table_temperature_from_f(f):
    """ Temperature in the tabulated convention, `TABLE_TEMPERATURE_FACTOR` times `temperature_from_f`"""
    return temperature_from_f(f).scaled(TABLE_TEMPERATURE_FACTOR)


def mean_photon_from_f(f):
    """ Mean photon number ``(2 + 9F) / (4 sqrt(1 + 4F)) - 1/2``

    :param f: uncertainty function value, non-negative
    :returns: mean photon number, 0 for ``f = 0``
    """
    _check_f(f)
    return (2.0 + 9.0 * f) / (4.0 * math.sqrt(1.0 + 4.0 * f)) - 0.5


@dataclass
class PurityReport:
    """ Purity, temperature and mean photon number estimates of one record

    :param f_min: minimum of the uncertainty function over theta
    :param f_mean: mean of the uncertainty function over theta
    :param f_statistic: which of the two was used as the estimator input
    :param f_used: estimator input, after clamping at 0
    :param pi_f_approx: purity from the smooth inverse
    :param pi_f_exact: purity from the inverse of the piecewise bound
    :param mean_photon_f: mean photon number estimate from `f_used`
    :param pi_gauss: purity of the least squares covariance over all bins
    :param pi_gauss_three_angle: purity of the covariance from the variances at 0, pi/4 and pi/2
    :param mean_photon_stats: mean photon number from the second moments
    :param temperature: temperature, ``None`` for a pure state
    :param temperature_table: temperature in the tabulated convention
    :param temperature_label: ``thermal`` if the covariance is isotropic, otherwise ``effective``
    :param diagnostics: notes on clamped or out of range values
    """
    f_min: float
    f_mean: float
    f_statistic: str
    f_used: float
    pi_f_approx: float
    pi_f_exact: float
    mean_photon_f: float
    pi_gauss: Optional[float] = None
    pi_gauss_three_angle: Optional[float] = None
    mean_photon_stats: Optional[float] = None
    temperature: Optional[TemperatureScale] = None
    temperature_table: Optional[TemperatureScale] = None
    temperature_label: str = "effective"
    diagnostics: List[str] = field(default_factory=list)

    @property
    def pi_f(self):
        """ Headline purity estimate from the uncertainty function"""
        return self.pi_f_approx

    def toDict(self):
        """ Return report as dictionary suitable for JSON serialization"""
        return {
            "f_min": self.f_min,
            "f_mean": self.f_mean,
            "f_statistic": self.f_statistic,
            "f_used": self.f_used,
            "pi_f": self.pi_f_approx,
            "pi_f_approx": self.pi_f_approx,
            "pi_f_exact": self.pi_f_exact,
            "pi_gauss": self.pi_gauss,
            "pi_gauss_three_angle": self.pi_gauss_three_angle,
            "mean_photon_f": self.mean_photon_f,
            "mean_photon_stats": self.mean_photon_stats,
            "diagnostics": list(self.diagnostics),
        }


def _gaussian_purity(cov, route, diagnostics):
    try:
        pi = purity_gaussian(cov)
    except DomainError as e:
        diagnostics.append(f"{route} covariance has no valid purity: {e.msg}")
        return None
    if pi > 1.0:
        diagnostics.append(f"{route} purity {pi:.6f} exceeds 1 from sampling noise, reported as 1")
        pi = 1.0
    return pi


def _is_isotropic(cov, sampleCount):
    """ Compare the anisotropy of `cov` with the standard error of a fit over `sampleCount` samples"""
    a = 0.5 * (cov.sigma_qq + cov.sigma_pp)
    anisotropy = math.hypot(0.5 * (cov.sigma_qq - cov.sigma_pp), cov.sigma_pq)
    standard_error = 2.0 * a / math.sqrt(sampleCount)
    return anisotropy <= ISOTROPY_SIGMA_MULTIPLE * standard_error


def estimate_purity(profile, stats=None, f_statistic=F_STATISTIC_MEAN, frequencyHz=None):
    """ Run all estimators on an uncertainty profile

    :param profile: `UncertaintyProfile`
    :param stats: optional list of `QuadratureStats` for the Gaussian route, already loss inverted if required
    :param f_statistic: ``mean`` to use the theta averaged F, ``min`` to use its minimum
    :param frequencyHz: optional mode frequency, attached to the temperatures for conversion to Kelvin
    :returns: `PurityReport`
    """
    ensure(f_statistic in _F_STATISTICS, f"f_statistic must be one of {_F_STATISTICS}, not `{f_statistic}`",
           DomainError)
    logger = logging.getLogger(__name__)
    diagnostics = []

    f_value = profile.f_mean if f_statistic == F_STATISTIC_MEAN else profile.f_min
    if f_value < 0:
        note = f"F {f_statistic} = {f_value:.6g} is negative from sampling noise, clamped to 0"
        logger.warning(note)
        diagnostics.append(note)
        f_value = 0.0

    pi_approx = purity_from_f(f_value)
    pi_exact = purity_from_f_exact(f_value)
    if abs(relative_difference(pi_approx, pi_exact)) > APPROXIMATION_RELATIVE_TOLERANCE:
        diagnostics.append(f"smooth and piecewise purity estimates differ by more than "
                           f"{APPROXIMATION_RELATIVE_TOLERANCE:.0%}")
    piece = locate_piece(min(pi_approx, pi_exact))
    if not piece.isPrinted:
        note = (f"purity estimate {min(pi_approx, pi_exact):.6f} lies on extrapolated bound piece k={piece.k}, "
                f"below the tabulated range")
        logger.warning(note)
        diagnostics.append(note)

    report = PurityReport(f_min=profile.f_min, f_mean=profile.f_mean, f_statistic=f_statistic, f_used=f_value,
                          pi_f_approx=pi_approx, pi_f_exact=pi_exact, mean_photon_f=mean_photon_from_f(f_value),
                          diagnostics=diagnostics)

    try:
        temperature = temperature_from_f(f_value)
        omega = 2.0 * math.pi * frequencyHz if frequencyHz is not None else None
        report.temperature = temperature.withOmega(omega)
        report.temperature_table = report.temperature.scaled(TABLE_TEMPERATURE_FACTOR)
    except PureStateError as e:
        diagnostics.append(f"no temperature: {e.msg}")

    if stats:
        report.mean_photon_stats = mean_photon_from_stats(stats)
        try:
            cov = covariance_from_profile(stats) if len(stats) >= 3 else covariance_from_three_angles(stats)
            report.pi_gauss = _gaussian_purity(cov, "fitted", diagnostics)
            report.pi_gauss_three_angle = _gaussian_purity(covariance_from_three_angles(stats), "three angle",
                                                           diagnostics)
            if _is_isotropic(cov, sum(s.count for s in stats)):
                report.temperature_label = "thermal"
        except DomainError as e:
            diagnostics.append(f"covariance recovery failed: {e.msg}")

    for note in diagnostics:
        logger.debug("purity estimate note: %s", note)
    return report
