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
This module defines the tests for the purity estimation library
"""

__all__ = ["test_utils", "test_version_info", "test_distributions",
           "test_gaussian_state",
           "test_simulator", "test_record_io",
           "test_tomographic_stats",
           "test_bounds", "test_estimators",
           "test_gaussianity",
           "test_analysis",
           "test_config_parser",
           "test_ensemble",
           "test_cli",
           "test_logging"
           ]
