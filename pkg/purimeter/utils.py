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
This file defines the `PurimeterError` classes and utility functions

These are meant for internal use only
"""

import json
import re

import jmespath
import numpy as np


class PurimeterError(Exception):
    """Exception class to represent errors raised by the purity estimation toolkit

        :param msg: message related to error
        :param baseException: underlying exception, if any that caused the issue
    """

    def __init__(self, msg, baseException=None):
        """ constructor
        """
        super().__init__(msg)
        self._underlyingException = baseException
        self._msg = msg

    @property
    def msg(self):
        """ message associated with the error"""
        return self._msg

    def __repr__(self):
        return f"{type(self).__name__}(msg='{self._msg}', baseException={self._underlyingException})"

    def __str__(self):
        return f"{type(self).__name__}(msg='{self._msg}', baseException={self._underlyingException})"


class DomainError(PurimeterError, ValueError):
    """Raised when a numeric argument lies outside the domain of a formula

    Typical causes are purities outside (0, 1], negative uncertainty function values,
    unphysical or ill-estimated covariance matrices and invalid sample counts.
    """


class PureStateError(DomainError):
    """Raised when a quantity is only defined as a limit for a pure state

    For example, the temperature of a state with purity 1 (or with `F = 0`) is zero, which cannot be
    represented by the dimensionless temperature scale.
    """


class RecordFormatError(PurimeterError):
    """Raised when a quadrature record or configuration file cannot be parsed

    :param msg: message related to error
    :param lineNumber: 1-based line number of offending line, if known
    :param baseException: underlying exception, if any
    """

    def __init__(self, msg, lineNumber=None, baseException=None):
        if lineNumber is not None:
            msg = f"line {lineNumber}: {msg}"
        super().__init__(msg, baseException)
        self.lineNumber = lineNumber


class EnsembleError(PurimeterError):
    """Raised when too many acquisitions of an ensemble run could not be analyzed"""


def ensure(cond, msg="condition does not hold true", errorClass=PurimeterError):
    """ensure(cond, s) => throws errorClass(s) if c is not true

    :param cond: condition to test
    :param msg: Message to add to exception if exception is raised
    :param errorClass: exception class to raise, defaults to `PurimeterError`
    :raises: `errorClass` exception if condition does not hold true
    :returns: Does not return anything but raises exception if condition does not hold
    """

    def strip_margin(text):
        return re.sub(r'\n[ \t]*\|', '\n', text)

    if not cond:
        raise errorClass(strip_margin(msg))


def derive_seed_sequence(seed, index):
    """ Derive an independent random stream for item `index` of a run seeded with `seed`

    The derived stream depends only on the pair ``(seed, index)``, so items may be generated in any order
    or concurrently and still produce identical values.

    :param seed: non-negative integer master seed
    :param index: non-negative integer index of item (phase bin, acquisition, ...)
    :returns: `numpy.random.SeedSequence` instance
    """
    ensure(seed is not None and int(seed) >= 0, f"seed must be a non-negative integer, not `{seed}`", DomainError)
    ensure(int(index) >= 0, f"index must be a non-negative integer, not `{index}`", DomainError)
    return np.random.SeedSequence([int(seed), int(index)])


def derive_seed(seed, index):
    """ Derive a 64-bit unsigned integer seed for item `index` of a run seeded with `seed`

    :param seed: non-negative integer master seed
    :param index: non-negative integer index of item
    :returns: integer seed in range [0, 2**64)
    """
    return int(derive_seed_sequence(seed, index).generate_state(1, dtype=np.uint64)[0])


def parse_grid_spec(spec):
    """ Parse a grid specification of the form ``start:stop:step`` into a numpy array

    The stop value is included when it lies on the grid (within rounding).

    :param spec: grid specification string, for example ``"0.05:1:0.01"``
    :returns: numpy array of grid values
    """
    assert spec is not None, "Must have valid grid specification"

    parts = [x.strip() for x in spec.strip().split(":")]
    ensure(len(parts) == 3, f"grid specification `{spec}` must have the form `start:stop:step`", DomainError)

    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError as e:
        raise DomainError(f"grid specification `{spec}` must contain numbers", e) from e

    ensure(step > 0, "grid step must be positive", DomainError)
    ensure(stop >= start, "grid stop must not be less than start", DomainError)

    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    # rounding must not push the last point past `stop`
    return np.minimum(start + step * np.arange(count), stop)


def relative_difference(a, b):
    """ Difference between two estimates normalized to their average

    :param a: first estimate
    :param b: second estimate
    :returns: ``(a - b) / ((a + b) / 2)``
    """
    return (a - b) / ((a + b) / 2.0)


def json_value_from_path(searchPath, jsonData, defaultValue):
    """ Get JSON value from JSON data referenced by searchPath

    searchPath should be a JSON path as supported by the `jmespath` package
    (see https://jmespath.org/)

    :param searchPath: A `jmespath` compatible JSON search path
    :param jsonData: The json data to search (string representation of the JSON data, or parsed dict)
    :param defaultValue: The default value to be returned if the value was not found
    :return: Returns the json value if present, otherwise returns the default value
    """
    assert searchPath is not None and len(searchPath) > 0, "search path cannot be empty"
    assert jsonData is not None and len(jsonData) > 0, "JSON data cannot be empty"

    jsonDict = json.loads(jsonData) if isinstance(jsonData, str) else jsonData

    jsonValue = jmespath.search(searchPath, jsonDict)

    if jsonValue is not None:
        return jsonValue

    return defaultValue
