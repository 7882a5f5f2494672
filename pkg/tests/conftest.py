"""Shared fixtures: small weighted spaces and two structural-zero patterns."""

import numpy as np
import pytest

from fixedmargin import BinaryMatrix, WeightMatrix


def _from_ones(m, n, cells):
    ent = np.zeros((m, n), dtype=np.int8)
    for i, j in cells:
        ent[i, j] = 1
    return BinaryMatrix(ent)


@pytest.fixture
def alternating_weights():
    # 3x3 weights favoring the off-center cells two to one; with unit margins
    # the space is the six permutation matrices, kappa 18, and every state
    # has probability 1/18 or 2/9
    return WeightMatrix([[1.0, 2.0, 1.0], [2.0, 1.0, 2.0], [1.0, 2.0, 1.0]])


@pytest.fixture
def unit_margins():
    return [1, 1, 1], [1, 1, 1]


@pytest.fixture
def no_diagonal():
    """3x3 all-ones weights with a zero diagonal, plus the two legal states.

    Under unit margins only the two 3-cycles avoid the diagonal, and no swap
    or trade connects them, so the space is reducible: the textbook case the
    connectivity checks must catch.
    """
    weights = WeightMatrix(np.ones((3, 3)) - np.eye(3))
    up = _from_ones(3, 3, [(0, 1), (1, 2), (2, 0)])
    down = _from_ones(3, 3, [(0, 2), (1, 0), (2, 1)])
    return weights, up, down


@pytest.fixture
def far_pair():
    """A 5x5 zero pattern with two permutation states much farther apart
    than half their Hamming distance, showing that structural zeros break
    the usual swap-distance bound."""
    zeros = {(0, 2), (0, 3), (0, 4), (1, 3), (1, 4),
             (2, 1), (2, 4), (3, 1), (3, 2), (4, 3)}
    w = np.ones((5, 5))
    for i, j in zeros:
        w[i, j] = 0.0
    a = BinaryMatrix.identity(5)
    b = _from_ones(5, 5, [(0, 0), (1, 1), (2, 3), (3, 4), (4, 2)])
    return WeightMatrix(w), a, b
