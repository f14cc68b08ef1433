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
This file defines reading and writing of quadrature records in CSV form

The record format is a header line ``theta_rad,quadrature`` followed by one row per sample, with decimal floats,
LF line endings and rows grouped by ascending phase bin.
"""

import logging
import re

import pandas as pd

from .purimeter_constants import CSV_THETA_COLUMN, CSV_QUADRATURE_COLUMN
from .simulator import PhaseBinnedSeries
from .utils import RecordFormatError, DomainError

_EXPECTED_COLUMNS = [CSV_THETA_COLUMN, CSV_QUADRATURE_COLUMN]
_PARSER_LINE_PATTERN = re.compile(r"line (\d+)")


def write_series_csv(series, path):
    """ Write a phase binned record as CSV

    :param series: `PhaseBinnedSeries`
    :param path: output file path
    :raises: `OSError` if the path cannot be written
    """
    df = series.toPandas()
    df.to_csv(path, index=False, lineterminator="\n")
    logging.getLogger(__name__).info("wrote %d samples in %d bins to %s", len(df), series.binCount, path)


def read_series_csv(path):
    """ Read a phase binned record from CSV

    Bins are reconstructed from the distinct `theta_rad` values.

    :param path: input file path
    :returns: `PhaseBinnedSeries`
    :raises: `RecordFormatError` for malformed content (with the offending line number), `OSError` if the file
             cannot be read
    """
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True,
                         skip_blank_lines=False)
    except pd.errors.EmptyDataError as e:
        raise RecordFormatError("record is empty", lineNumber=1, baseException=e) from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE_PATTERN.search(str(e))
        line_number = int(match.group(1)) if match else None
        raise RecordFormatError("malformed row", lineNumber=line_number, baseException=e) from e

    if list(df.columns) != _EXPECTED_COLUMNS:
        raise RecordFormatError(f"header must be `{','.join(_EXPECTED_COLUMNS)}`, found `{','.join(df.columns)}`",
                                lineNumber=1)

    # blank lines keep their place in the index, so index + 2 is the line in the file
    df = df.fillna("")
    df = df[~(df == "").all(axis=1)]
    if df.empty:
        raise RecordFormatError("record contains no samples", lineNumber=2)

    numeric = df.apply(pd.to_numeric, errors="coerce")
    bad_rows = numeric.isna().any(axis=1)
    if bad_rows.any():
        label = bad_rows[bad_rows].index[0]
        row_text = ",".join(df.loc[label].tolist())
        raise RecordFormatError(f"row `{row_text}` does not contain two decimal numbers", lineNumber=int(label) + 2)

    try:
        return PhaseBinnedSeries.fromPandas(numeric)
    except DomainError as e:
        raise RecordFormatError(f"cannot reconstruct phase bins: {e.msg}", baseException=e) from e
