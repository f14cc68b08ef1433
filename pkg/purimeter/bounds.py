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
This file defines the purity dependent lower bound on the tomographic uncertainty function

For a state of purity `pi` the uncertainty function satisfies ``F >= (Phi(pi)**2 - 1) / 4``, where `Phi` is a
continuous, piecewise defined function. Piece `k` (k = 1, 2, ...) covers
``2(2k+3) / (3(k+1)(k+2)) <= pi <= 2(2k+1) / (3k(k+1))`` and has the value

``Phi(pi) = (k + 1) - sqrt(k(k+1)(k+2) / 3 * (pi - 1 / (k + 1)))``

The first three pieces are ``2 - sqrt(2 pi - 1)``, ``3 - sqrt(8 (pi - 1/3))`` and ``4 - sqrt(20 (pi - 1/4))``.
Adjacent pieces meet at ``Phi = (2k + 3) / 3``.

The smooth approximation ``Phi~(pi) = (4 + sqrt(16 + 9 pi**2)) / (9 pi)`` stays within 2% of `Phi`.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .purimeter_constants import PRINTED_PIECE_COUNT
from .utils import ensure, DomainError


def _check_purity(pi):
    ensure(pi is not None and np.isfinite(pi) and 0.0 < pi <= 1.0, f"purity must be in (0, 1], not `{pi}`",
           DomainError)


def piece_upper_endpoint(k):
    """ Largest purity covered by piece `k`, ``2(2k + 1) / (3k(k + 1))``"""
    return 2.0 * (2.0 * k + 1.0) / (3.0 * k * (k + 1.0))


@dataclass(frozen=True)
class BoundPiece:
    """ One piece of the piecewise bound function

    :param k: piece index, a positive integer; piece 1 covers the purest states
    """
    k: int

    def __post_init__(self):
        ensure(isinstance(self.k, (int, np.integer)) and self.k >= 1,
               f"piece index must be a positive integer, not `{self.k}`", DomainError)

    @property
    def pi_lower(self):
        return piece_upper_endpoint(self.k + 1)

    @property
    def pi_upper(self):
        return piece_upper_endpoint(self.k)

    @property
    def constant(self):
        return float(self.k + 1)

    @property
    def coefficient(self):
        return self.k * (self.k + 1.0) * (self.k + 2.0) / 3.0

    @property
    def offset(self):
        return 1.0 / (self.k + 1.0)

    @property
    def isPrinted(self):
        """ True for the pieces whose closed form is tabulated in the literature (k <= 3)"""
        return self.k <= PRINTED_PIECE_COUNT

    def contains(self, pi):
        return self.pi_lower <= pi <= self.pi_upper

    def value(self, pi):
        """ Evaluate the piece at purity `pi`"""
        return self.constant - math.sqrt(self.coefficient * (pi - self.offset))

    def __str__(self):
        return (f"BoundPiece(k={self.k}, {self.pi_lower:.6f} <= pi <= {self.pi_upper:.6f}: "
                f"{self.constant:g} - sqrt({self.coefficient:g} * (pi - {self.offset:.6f})))")


def bound_piece(k):
    """ Return the `BoundPiece` with index `k`"""
    return BoundPiece(int(k))


def locate_piece(pi):
    """ Find the piece whose interval contains purity `pi`

    At a shared endpoint the purer piece (smaller `k`) is returned; both give the same value there.

    :param pi: purity in (0, 1]
    :returns: `BoundPiece`
    """
    _check_purity(pi)
    # the upper endpoints behave as 4 / (3k) for large k
    k = max(1, int(4.0 / (3.0 * pi)))
    while k > 1 and pi >= piece_upper_endpoint(k):
        k -= 1
    while pi < piece_upper_endpoint(k + 1):
        k += 1
    return BoundPiece(k)


def phi_exact(pi):
    """ Piecewise bound function `Phi` at purity `pi`

    :param pi: purity in (0, 1]
    :returns: value of `Phi`, at least 1
    :raises: `DomainError` if `pi` is outside (0, 1]
    """
    piece = locate_piece(pi)
    if not piece.isPrinted:
        logging.getLogger(__name__).debug("purity %.6g uses extrapolated piece k=%d", pi, piece.k)
    return piece.value(pi)


def phi_approx(pi):
    """ Smooth approximation ``(4 + sqrt(16 + 9 pi**2)) / (9 pi)`` of the bound function

    :param pi: purity in (0, 1]
    :returns: approximate value of `Phi`
    :raises: `DomainError` if `pi` is outside (0, 1]
    """
    _check_purity(pi)
    return (4.0 + math.sqrt(16.0 + 9.0 * pi * pi)) / (9.0 * pi)


def f_bound(pi, exact=True):
    """ Lower bound ``(Phi(pi)**2 - 1) / 4`` on the uncertainty function for states of purity `pi`

    :param pi: purity in (0, 1]
    :param exact: if True use the piecewise `Phi`, otherwise the smooth approximation
    :returns: bound value, 0 for pure states
    """
    phi = phi_exact(pi) if exact else phi_approx(pi)
    return 0.25 * (phi * phi - 1.0)


def f_bound_expanded(pi):
    """ Approximate bound in expanded form ``[8 + 2 sqrt(16 + 9 pi**2) - 18 pi**2] / (81 pi**2)``

    Equal to ``f_bound(pi, exact=False)``.
    """
    _check_purity(pi)
    pi2 = pi * pi
    return (8.0 + 2.0 * math.sqrt(16.0 + 9.0 * pi2) - 18.0 * pi2) / (81.0 * pi2)


def max_approximation_error(grid):
    """ Largest relative deviation ``|Phi~ - Phi| / Phi`` over a purity grid

    :param grid: iterable of purities in (0, 1]
    :returns: tuple of ``(max_relative_deviation, purity_at_max)``
    """
    grid = np.asarray(grid, dtype=float)
    ensure(grid.size > 0, "purity grid must not be empty", DomainError)
    deviations = np.array([abs(phi_approx(p) - phi_exact(p)) / phi_exact(p) for p in grid])
    index = int(np.argmax(deviations))
    return float(deviations[index]), float(grid[index])


def bound_table(grid):
    """ Tabulate the bound functions over a purity grid

    Columns: ``pi``, ``piece``, ``phi``, ``phi_approx``, ``rel_dev``, ``f_bound``, ``f_bound_approx``,
    ``pi_from_f`` (smooth inverse applied to the approximate bound), ``pi_from_exact_bound`` (smooth inverse applied to
    the exact bound).

    :param grid: iterable of purities in (0, 1]
    :returns: pandas DataFrame, one row per grid point
    """
    # deferred to avoid a circular import; the estimators build on this module
    from .estimators import purity_from_f

    rows = []
    for pi in np.asarray(grid, dtype=float):
        piece = locate_piece(pi)
        phi = piece.value(pi)
        phi_t = phi_approx(pi)
        bound = 0.25 * (phi * phi - 1.0)
        bound_approx = 0.25 * (phi_t * phi_t - 1.0)
        rows.append({
            "pi": float(pi),
            "piece": piece.k,
            "phi": phi,
            "phi_approx": phi_t,
            "rel_dev": abs(phi_t - phi) / phi,
            "f_bound": bound,
            "f_bound_approx": bound_approx,
            "pi_from_f": purity_from_f(max(bound_approx, 0.0)),
            "pi_from_exact_bound": purity_from_f(max(bound, 0.0)),
        })
    return pd.DataFrame(rows, columns=["pi", "piece", "phi", "phi_approx", "rel_dev", "f_bound", "f_bound_approx",
                                       "pi_from_f", "pi_from_exact_bound"])
