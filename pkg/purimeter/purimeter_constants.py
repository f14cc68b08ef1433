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
This module defines library constants

All quadrature quantities use the hbar = 1 convention, in which the vacuum quadrature variance is 1/2.
"""

# default random seed
DEFAULT_RANDOM_SEED = 42

# minimum versions for version checks
MIN_PYTHON_VERSION = (3, 8)

# shot noise level
VACUUM_VARIANCE = 0.5

# constructors accept det(cov) >= 1/4 - tolerance
PHYSICALITY_TOLERANCE = 1e-9

# acquisition geometry
DEFAULT_BIN_COUNT = 48
PAPER_BIN_COUNT = 47
DEFAULT_SAMPLES_PER_BIN = 2100
MIN_BIN_COUNT = 3
MIN_SAMPLES_PER_BIN = 2

# detector
DEFAULT_EFFICIENCY = 0.88
DEFAULT_ELECTRONIC_NOISE_VARIANCE = 0.0

# analysis options
BINS_MODE_NATIVE = "native"
BINS_MODE_GRID48 = "grid48"
BINS_MODE_PAPER47 = "paper47"
BINS_MODES = {BINS_MODE_NATIVE: None, BINS_MODE_GRID48: DEFAULT_BIN_COUNT, BINS_MODE_PAPER47: PAPER_BIN_COUNT}

TEMP_CONVENTION_EQ = "eq"
TEMP_CONVENTION_TABLE = "table"
TEMP_CONVENTION_BOTH = "both"
TEMP_CONVENTIONS = (TEMP_CONVENTION_EQ, TEMP_CONVENTION_TABLE, TEMP_CONVENTION_BOTH)

# table temperature convention is this multiple of the closed form 1 / (2 atanh(pi))
TABLE_TEMPERATURE_FACTOR = 4.0

F_STATISTIC_MEAN = "mean"
F_STATISTIC_MIN = "min"

# covariance counts as isotropic when its anisotropy is within this many standard errors
ISOTROPY_SIGMA_MULTIPLE = 4.0

# normality testing
DEFAULT_SIGNIFICANCE = 0.01
SHAPIRO_MIN_SAMPLES = 12
SHAPIRO_MAX_SAMPLES = 5000
KURTOSIS_MIN_SAMPLES = 4
# fraction of repeated values above which a tie warning is attached
TIE_FRACTION_TOLERANCE = 0.01

# bound function evaluation
PURITY_BISECTION_TOLERANCE = 1e-10
APPROXIMATION_RELATIVE_TOLERANCE = 0.02
PRINTED_PIECE_COUNT = 3

# ensemble
DEFAULT_ACQUISITION_COUNT = 218
DEFAULT_PURITY_RANGE = (0.3, 0.95)
MAX_FAILURE_FRACTION = 0.10
MIN_TREND_RECORDS = 10
DEFAULT_TREND_BINS = 5

# report serialization
REPORT_SCHEMA_VERSION = 1

# CSV record format
CSV_THETA_COLUMN = "theta_rad"
CSV_QUADRATURE_COLUMN = "quadrature"

# CLI exit codes
EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 2
EXIT_IO_ERROR = 3

