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
This file defines the Normal / Gaussian quadrature distribution

The homodyne tomogram of a Gaussian state at a fixed local oscillator phase is a normal distribution.
"""

import math

from .quadrature_distribution import QuadratureDistribution


class Normal(QuadratureDistribution):
    def __init__(self, mean, variance):
        ''' Specify that quadrature samples should follow a normal distribution

        :param mean: mean of distribution
        :param variance: variance of distribution, must be positive
        '''
        QuadratureDistribution.__init__(self)
        assert variance is not None and variance > 0, f"variance must be positive, not `{variance}`"
        self.mean = mean if mean is not None else 0.0
        self.variance = variance

    @property
    def stddev(self):
        """ Return standard deviation"""
        return math.sqrt(self.variance)

    def generateSample(self, size):
        """ Generate sample of data for distribution

        :param size: number of values to draw
        :return: numpy array of normal samples with the distribution's mean and variance
        """
        rng = self.get_np_random_generator(self.randomSeed)
        return rng.normal(self.mean, self.stddev, size)

    def __str__(self):
        """ Return string representation of object """
        return f"NormalDistribution( mean={self.mean}, variance={self.variance}, randomSeed={self.randomSeed})"
