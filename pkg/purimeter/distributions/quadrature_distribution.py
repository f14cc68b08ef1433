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
This file defines the base class for quadrature sampling distributions

Each inherited version of the QuadratureDistribution object draws quadrature values for one phase bin
of a simulated homodyne acquisition.

Random streams are derived from a seed so that the same seed always reproduces the same samples, independent of
the order in which phase bins are generated.
"""
import copy

import numpy as np
from numpy.random import default_rng


class QuadratureDistribution(object):
    """ Base class for all quadrature sampling distributions"""
    def __init__(self):
        self._randomSeed = None

    @staticmethod
    def get_np_random_generator(random_seed):
        """ Get numpy random number generator

        :param random_seed: Numeric random seed or `numpy.random.SeedSequence` to use.
                            If None or -1, then a non-repeatable generator is returned
        :return: `numpy.random.Generator` instance
        """
        assert random_seed is None or isinstance(random_seed, (np.random.SeedSequence, np.integer, int)), \
            f"`randomSeed` must be int, int-like or SeedSequence not {type(random_seed)}"
        if random_seed is None or (not isinstance(random_seed, np.random.SeedSequence) and random_seed == -1):
            return default_rng()

        return default_rng(random_seed)

    def generateSample(self, size):
        """ Generate sample of data for distribution

        :param size: number of values to draw
        :return: numpy array of samples
        """
        raise NotImplementedError(f"`generateSample` is not implemented for {type(self).__name__}")

    def withRandomSeed(self, seed):
        """ Create copy of object and set the random seed attribute

        :param seed: random generator seed value to set. Should be integer, `SeedSequence` or None
        :return: new instance of distribution object with seed set
        """
        new_distribution_instance = copy.copy(self)
        new_distribution_instance._randomSeed = seed
        return new_distribution_instance

    @property
    def randomSeed(self):
        """get the `randomSeed` attribute """
        return self._randomSeed
