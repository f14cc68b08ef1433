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
This file defines the single mode Gaussian state model and its closed form properties

All quantities are dimensionless and use the hbar = 1 convention, so that the vacuum quadrature variance is 1/2.
Temperatures are expressed in units of ``hbar * omega / k_B``.

The main types are:

* `CovarianceMatrix` - second central moments ``(sigma_qq, sigma_pp, sigma_pq)`` of the quadratures
* `GaussianState` - first moments plus a covariance matrix
* `TemperatureScale` - dimensionless temperature with optional angular frequency for conversion to Kelvin
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import constants, stats

from .purimeter_constants import VACUUM_VARIANCE, PHYSICALITY_TOLERANCE
from .utils import ensure, DomainError, PureStateError

_MINIMUM_DETERMINANT = VACUUM_VARIANCE ** 2


@dataclass(frozen=True)
class CovarianceMatrix:
    """ Quadrature covariance matrix of a single mode state

    :param sigma_qq: variance of the `Q` quadrature
    :param sigma_pp: variance of the `P` quadrature
    :param sigma_pq: symmetrized covariance of `Q` and `P`

    Both variances must be positive. Physicality (``det >= 1/4``) is not enforced here, as covariances recovered
    from noisy data may violate it; use `isPhysical` or construct a `GaussianState` to check it.
    """
    sigma_qq: float
    sigma_pp: float
    sigma_pq: float = 0.0

    def __post_init__(self):
        ensure(np.isfinite([self.sigma_qq, self.sigma_pp, self.sigma_pq]).all(),
               f"covariance entries must be finite: {self}", DomainError)
        ensure(self.sigma_qq > 0 and self.sigma_pp > 0,
               f"quadrature variances must be positive: {self}", DomainError)

    @classmethod
    def vacuum(cls):
        """ Return covariance matrix of the vacuum state"""
        return cls(VACUUM_VARIANCE, VACUUM_VARIANCE, 0.0)

    @classmethod
    def isotropic(cls, variance):
        """ Return covariance matrix with equal quadrature variances and no correlation

        :param variance: variance of each quadrature
        """
        return cls(variance, variance, 0.0)

    @property
    def determinant(self):
        """ Determinant ``sigma_qq * sigma_pp - sigma_pq**2``"""
        return self.sigma_qq * self.sigma_pp - self.sigma_pq ** 2

    def isPhysical(self, tolerance=PHYSICALITY_TOLERANCE):
        """ Check the Schroedinger-Robertson inequality ``det >= 1/4``

        :param tolerance: absolute tolerance on the determinant
        :returns: True if physical
        """
        return self.determinant >= _MINIMUM_DETERMINANT - tolerance

    def sigmaXX(self, mu, nu):
        """ Variance of the generalized quadrature ``mu * Q + nu * P`` - see `sigma_xx`"""
        return sigma_xx(self, mu, nu)

    def rotated(self, theta):
        """ Return the covariance matrix in a quadrature frame rotated by `theta`

        The rotated `Q'` is the quadrature measured at local oscillator phase `theta`.

        :param theta: rotation angle in radians
        :returns: new `CovarianceMatrix`
        """
        c, s = math.cos(theta), math.sin(theta)
        sqq = c * c * self.sigma_qq + s * s * self.sigma_pp + 2 * c * s * self.sigma_pq
        spp = s * s * self.sigma_qq + c * c * self.sigma_pp - 2 * c * s * self.sigma_pq
        spq = (c * c - s * s) * self.sigma_pq + c * s * (self.sigma_pp - self.sigma_qq)
        return CovarianceMatrix(sqq, spp, spq)

    def afterLoss(self, efficiency):
        """ Covariance seen through a detector with quantum efficiency `efficiency`

        Applies the vacuum admixture map ``cov -> eta * cov + (1 - eta) / 2 * I``.

        :param efficiency: quantum efficiency in (0, 1]
        :returns: new `CovarianceMatrix`
        """
        _check_efficiency(efficiency)
        admixture = (1.0 - efficiency) * VACUUM_VARIANCE
        return CovarianceMatrix(efficiency * self.sigma_qq + admixture,
                                efficiency * self.sigma_pp + admixture,
                                efficiency * self.sigma_pq)

    def withLossInverted(self, efficiency):
        """ Undo the vacuum admixture map of `afterLoss`

        :param efficiency: quantum efficiency in (0, 1]
        :returns: new `CovarianceMatrix`
        """
        _check_efficiency(efficiency)
        admixture = (1.0 - efficiency) * VACUUM_VARIANCE
        return CovarianceMatrix((self.sigma_qq - admixture) / efficiency,
                                (self.sigma_pp - admixture) / efficiency,
                                self.sigma_pq / efficiency)

    def toDict(self):
        """ Return covariance entries as dictionary"""
        return {"sigma_qq": self.sigma_qq, "sigma_pp": self.sigma_pp, "sigma_pq": self.sigma_pq}


@dataclass(frozen=True)
class TemperatureScale:
    """ Dimensionless temperature ``T * k_B / (hbar * omega)``

    :param value: dimensionless temperature, must be positive
    :param omega: optional angular frequency of the mode in rad/s, used for conversion to Kelvin
    """
    value: float
    omega: Optional[float] = None

    def __post_init__(self):
        ensure(np.isfinite(self.value) and self.value > 0,
               f"temperature must be positive and finite, not `{self.value}`", DomainError)
        ensure(self.omega is None or self.omega > 0, "angular frequency must be positive", DomainError)

    @classmethod
    def fromFrequency(cls, value, frequencyHz):
        """ Create temperature scale for an optical mode of frequency `frequencyHz`

        :param value: dimensionless temperature
        :param frequencyHz: mode frequency in Hz
        """
        return cls(value, omega=2.0 * math.pi * frequencyHz)

    def withOmega(self, omega):
        """ Return copy of temperature scale with angular frequency set"""
        return TemperatureScale(self.value, omega)

    def kelvin(self):
        """ Convert to Kelvin

        :returns: temperature in Kelvin
        :raises: `DomainError` if no angular frequency is set
        """
        ensure(self.omega is not None, "conversion to Kelvin requires the mode angular frequency", DomainError)
        return self.value * constants.hbar * self.omega / constants.k

    def scaled(self, factor):
        """ Return temperature scaled by `factor`, keeping the angular frequency"""
        return TemperatureScale(self.value * factor, self.omega)


@dataclass(frozen=True)
class GaussianState:
    """ Single mode Gaussian state

    :param mean_q: mean of the `Q` quadrature
    :param mean_p: mean of the `P` quadrature
    :param cov: covariance matrix, must satisfy ``det(cov) >= 1/4`` (within `PHYSICALITY_TOLERANCE`)
    """
    mean_q: float
    mean_p: float
    cov: CovarianceMatrix

    def __post_init__(self):
        ensure(isinstance(self.cov, CovarianceMatrix), "`cov` must be a CovarianceMatrix", DomainError)
        ensure(np.isfinite([self.mean_q, self.mean_p]).all(), "quadrature means must be finite", DomainError)
        ensure(self.cov.isPhysical(),
               f"unphysical covariance, determinant {self.cov.determinant:.6g} is below 1/4: {self.cov}",
               DomainError)

    @classmethod
    def vacuum(cls):
        """ Vacuum state"""
        return cls(0.0, 0.0, CovarianceMatrix.vacuum())

    @classmethod
    def coherent(cls, mean_q, mean_p):
        """ Coherent state with the given quadrature means"""
        return cls(mean_q, mean_p, CovarianceMatrix.vacuum())

    @classmethod
    def thermal(cls, nbar):
        """ Thermal state with mean photon number `nbar`

        :param nbar: mean photon number, must be non-negative
        """
        ensure(np.isfinite(nbar) and nbar >= 0, f"mean photon number must be non-negative, not `{nbar}`",
               DomainError)
        return cls(0.0, 0.0, CovarianceMatrix.isotropic(nbar + VACUUM_VARIANCE))

    @classmethod
    def thermalFromPurity(cls, purity):
        """ Thermal state with purity `purity` in (0, 1]"""
        return cls.thermal(mean_photon_from_purity(purity))

    @classmethod
    def general(cls, sigma_qq, sigma_pp, sigma_pq=0.0, mean_q=0.0, mean_p=0.0):
        """ Gaussian state from explicit moments"""
        return cls(mean_q, mean_p, CovarianceMatrix(sigma_qq, sigma_pp, sigma_pq))

    @property
    def purity(self):
        """ Purity ``Tr[rho**2]`` of the state"""
        return purity_gaussian(self.cov)

    @property
    def meanPhotonNumber(self):
        """ Mean photon number ``(<Q^2> + <P^2> - 1) / 2``"""
        return 0.5 * (self.cov.sigma_qq + self.cov.sigma_pp + self.mean_q ** 2 + self.mean_p ** 2 - 1.0)

    @property
    def uncertaintyFunction(self):
        """ Exact value of the tomographic uncertainty function

        For any state this is the rotated frame determinant less 1/4, which is independent of the phase.
        """
        return self.cov.determinant - _MINIMUM_DETERMINANT

    def quadratureMean(self, mu, nu):
        """ Mean of the generalized quadrature ``mu * Q + nu * P``"""
        return mu * self.mean_q + nu * self.mean_p

    def afterLoss(self, efficiency):
        """ Effective state seen through a detector with quantum efficiency `efficiency`

        Means are scaled by ``sqrt(eta)`` and the covariance is mixed with the vacuum.
        """
        scale = math.sqrt(efficiency)
        return GaussianState(scale * self.mean_q, scale * self.mean_p, self.cov.afterLoss(efficiency))

    def describe(self):
        """ Return dictionary of the state's moments and derived properties"""
        return {
            "mean_q": self.mean_q,
            "mean_p": self.mean_p,
            "cov": self.cov.toDict(),
            "purity": self.purity,
            "mean_photon_number": self.meanPhotonNumber,
            "uncertainty_function": self.uncertaintyFunction,
        }


def _check_efficiency(efficiency):
    ensure(0.0 < efficiency <= 1.0, f"quantum efficiency must be in (0, 1], not `{efficiency}`", DomainError)


def _temperature_value(t):
    if isinstance(t, TemperatureScale):
        return t.value
    ensure(t is not None and np.isfinite(t) and t > 0, f"temperature must be positive, not `{t}`", DomainError)
    return float(t)


def sigma_xx(cov, mu, nu):
    """ Variance of the generalized quadrature ``X = mu * Q + nu * P``

    ``sigma_xx = mu**2 * sigma_qq + nu**2 * sigma_pp + 2 * mu * nu * sigma_pq``

    For the quadrature measured at local oscillator phase `theta` use ``mu = cos(theta)``, ``nu = sin(theta)``.

    :param cov: `CovarianceMatrix`
    :param mu: coefficient of `Q` (scalar or numpy array)
    :param nu: coefficient of `P` (scalar or numpy array)
    :returns: variance
    """
    return mu * mu * cov.sigma_qq + nu * nu * cov.sigma_pp + 2.0 * mu * nu * cov.sigma_pq


def gaussian_tomogram_density(state, x, mu, nu):
    """ Symplectic tomogram of a Gaussian state

    Normal density of ``X = mu * Q + nu * P`` with mean ``mu * mean_q + nu * mean_p`` and variance
    ``sigma_xx(cov, mu, nu)``.

    :param state: `GaussianState`
    :param x: quadrature value(s)
    :param mu: coefficient of `Q`
    :param nu: coefficient of `P`
    :returns: density value(s)
    :raises: `DomainError` for the degenerate direction ``mu = nu = 0``
    """
    ensure(not (mu == 0 and nu == 0), "tomogram direction (mu, nu) must not be (0, 0)", DomainError)
    variance = sigma_xx(state.cov, mu, nu)
    ensure(variance > 0, f"quadrature variance must be positive, not `{variance}`", DomainError)
    return stats.norm.pdf(x, loc=state.quadratureMean(mu, nu), scale=math.sqrt(variance))


def purity_gaussian(cov):
    """ Purity of a Gaussian state, ``1 / (2 * sqrt(det(cov)))``

    :param cov: `CovarianceMatrix`
    :returns: purity, at most 1 for physical covariances
    :raises: `DomainError` if the determinant is not positive (unphysical or ill-estimated covariance)
    """
    det = cov.determinant
    ensure(det > 0, f"covariance determinant must be positive, not `{det:.6g}` - covariance is unphysical "
                    "or ill-estimated", DomainError)
    return 1.0 / (2.0 * math.sqrt(det))


def purity_from_mean_photon(nbar):
    """ Purity ``1 / (2 * nbar + 1)`` of a thermal state with mean photon number `nbar`"""
    ensure(nbar >= 0, f"mean photon number must be non-negative, not `{nbar}`", DomainError)
    return 1.0 / (2.0 * nbar + 1.0)


def mean_photon_from_purity(purity):
    """ Mean photon number ``(1 - purity) / (2 * purity)`` of a thermal state with purity `purity`"""
    ensure(0.0 < purity <= 1.0, f"purity must be in (0, 1], not `{purity}`", DomainError)
    return (1.0 - purity) / (2.0 * purity)


def thermal_from_temperature(t):
    """ Thermal state at temperature `t`

    ``sigma_qq = sigma_pp = coth(1 / 2T) / 2``, no correlation, zero means.

    :param t: `TemperatureScale` or positive float
    :returns: `GaussianState`
    """
    return GaussianState.thermal(mean_photon_thermal(t))


def temperature_from_purity(pi):
    """ Temperature of the thermal state with purity `pi`, ``T = 1 / (2 * atanh(pi))``

    :param pi: purity in (0, 1)
    :returns: `TemperatureScale`
    :raises: `PureStateError` for ``pi = 1`` (zero temperature), `DomainError` outside (0, 1)
    """
    ensure(pi is not None and np.isfinite(pi), f"purity must be finite, not `{pi}`", DomainError)
    if pi == 1.0:
        raise PureStateError("purity 1 corresponds to zero temperature, which is only defined as a limit")
    ensure(0.0 < pi < 1.0, f"purity must be in (0, 1), not `{pi}`", DomainError)
    return TemperatureScale(1.0 / (2.0 * math.atanh(pi)))


def mean_photon_thermal(t):
    """ Mean photon number of a thermal state, ``coth(1 / 2T) / 2 - 1 / 2 = 1 / (exp(1 / T) - 1)``

    :param t: `TemperatureScale` or positive float
    :returns: mean photon number
    """
    inverse_t = 1.0 / _temperature_value(t)
    if inverse_t > 700.0:
        # expm1 overflows; the occupation is exp(-1/T) to double precision
        return math.exp(-inverse_t)
    return 1.0 / math.expm1(inverse_t)
