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
Version of the purity estimation library

The version string is rewritten by `bumpversion` on release, so it stays a plain literal.
Analysis reports carry it so that stored reports can be traced to the code that produced them.
"""

from collections import namedtuple
import re

VersionInfo = namedtuple('VersionInfo', ['major', 'minor', 'patch', 'release', 'build'])

_VERSION_PATTERN = re.compile(r'(?P<major>\d+)\.(?P<minor>\d+)(?:\.(?P<patch>\d+))?(?P<release>[a-z]*)(?P<build>\d*)')


def get_version(version):
    """ Split a version string such as ``0.1.0`` or ``1.2.3rc4`` into its parts

    :param version: version string
    :returns: `VersionInfo` of strings; missing parts are empty strings
    :raises: `ValueError` if `version` is not a release version string
    """
    match = _VERSION_PATTERN.fullmatch(version)
    if match is None:
        raise ValueError(f"not a version string: `{version}`")
    return VersionInfo(**{name: value or "" for name, value in match.groupdict().items()})


__version__ = "0.1.0"  # DO NOT EDIT THIS DIRECTLY!  It is managed by bumpversion
__version_info__ = get_version(__version__)
