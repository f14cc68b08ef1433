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
This module defines the package contents for the purity estimation library

The main entry points are the `HomodyneSimulator` class, which generates synthetic homodyne records, and the
`HomodyneAnalyzer` class, which estimates purity, temperature and mean photon number from a record.
The `EnsembleRunner` class runs many simulated acquisitions and summarizes the estimator residuals.

Most of the other classes are used for internal purposes only
"""

from .purimeter_constants import DEFAULT_RANDOM_SEED, MIN_PYTHON_VERSION, VACUUM_VARIANCE, REPORT_SCHEMA_VERSION
from .utils import ensure, json_value_from_path, parse_grid_spec, relative_difference, \
    PurimeterError, DomainError, PureStateError, RecordFormatError, EnsembleError
from ._version import __version__
from .gaussian_state import CovarianceMatrix, GaussianState, TemperatureScale, sigma_xx, \
    gaussian_tomogram_density, purity_gaussian, thermal_from_temperature, temperature_from_purity, \
    mean_photon_thermal
from .simulator import DetectorModel, AcquisitionConfig, PhaseBinnedSeries, HomodyneSimulator, \
    simulate_acquisition, simulate_shot_noise, rebin
from .record_io import read_series_csv, write_series_csv
from .tomographic_stats import QuadratureStats, UncertaintyProfile, bin_moments, variance_at, f_of_theta, \
    subtract_baseline, invert_loss, covariance_from_three_angles, covariance_from_profile, mean_photon_from_stats
from .bounds import BoundPiece, bound_piece, locate_piece, phi_exact, phi_approx, f_bound, f_bound_expanded, \
    bound_table
from .estimators import PurityReport, purity_from_f, purity_from_f_exact, temperature_from_f, \
    table_temperature_from_f, mean_photon_from_f, estimate_purity
from .gaussianity import NormalityResult, NormalitySummary, kurtosis_excess, shapiro_wilk, series_normality, \
    test_normality
from .analysis import AnalysisReport, HomodyneAnalyzer, analyze_series
from .config_parser import ConfigParser
from .ensemble import EnsembleConfig, EnsembleRunner, ResidualSummary, TrendReport, run_ensemble, residual_trend

__all__ = ["gaussian_state", "simulator", "record_io", "tomographic_stats", "bounds", "estimators",
           "gaussianity", "analysis", "config_parser", "ensemble", "cli", "utils", "purimeter_constants",
           "distributions"
           ]


def python_version_check(python_version_expected):
    """Check against Python version

       Allows minimum version to be passed in to facilitate unit testing

       :param python_version_expected: = minimum version of python to support as tuple e.g (3,6)
       :return: True if passed

        """
    import sys
    return sys.version_info >= python_version_expected


# lets check for a correct python version or raise an exception
if not python_version_check(MIN_PYTHON_VERSION):
    raise RuntimeError(f"Minimum version of Python supported is {MIN_PYTHON_VERSION[0]}.{MIN_PYTHON_VERSION[1]}")
