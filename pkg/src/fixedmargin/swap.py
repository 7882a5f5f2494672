"""Weighted checkerboard swap: one-pair proposals with a weight-ratio acceptance.

A proposal picks an unordered pair of 1-cells uniformly at random (all
C(k, 2) pairs are eligible, including pairs sharing a row or column, which
simply fail the checkerboard test).  A checkerboard pair, 1s at (i, j) and
(i', j') with the opposite corners empty, is swapped to (i, j') and (i', j)
with probability

    w[i', j] * w[i, j'] / (w[i, j] * w[i', j'] + w[i', j] * w[i, j']),

which makes the chain reversible with respect to the cell-weight product
model.  Margins are preserved by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

from ._streams import UniformStream
from .matrices import BinaryMatrix, WeightMatrix

NO_CHECKERBOARD = "no-checkerboard"
REJECTED = "rejected"
SWAPPED = "swapped"

_OUTCOMES = (NO_CHECKERBOARD, REJECTED, SWAPPED)


@dataclass(frozen=True)
class SwapProposal:
    """One sampled pair of 1-cells and its acceptance probability.

    `swap_probability` is None when the pair is not a checkerboard (shared
    row, shared column, or an occupied opposite corner).
    """

    ones_pair: tuple[tuple[int, int], tuple[int, int]]
    is_checkerboard: bool
    swap_probability: float | None


def swap_probability(weights: WeightMatrix, i: int, j: int, i_prime: int, j_prime: int) -> float:
    """Acceptance probability for swapping 1s at (i, j), (i', j') to (i, j'), (i', j).

    Requires distinct rows and distinct columns.  Raises ValueError when both
    the current and the swapped cell pairs have zero weight (a 0/0 ratio,
    unreachable from any matrix that is compatible with the weights).
    """
    if i == i_prime or j == j_prime:
        raise ValueError("swap cells must occupy distinct rows and distinct columns")
    w = weights._rows
    stay = w[i][j] * w[i_prime][j_prime]
    move = w[i_prime][j] * w[i][j_prime]
    total = stay + move
    if total == 0.0:
        raise ValueError("both cell pairs have zero weight; the state is incompatible")
    return move / total


def _draw_pair(k: int, u) -> tuple[int, int]:
    # uniform over ordered pairs of distinct indices = uniform unordered pair
    a = int(u() * k)
    b = int(u() * (k - 1))
    if b >= a:
        b += 1
    return a, b


def _step(state: BinaryMatrix, wrows, u) -> int:
    """One proposal against nested-list weights; returns 0 no-op, 1 reject, 2 swap."""
    ones = state.ones
    k = len(ones)
    if k < 2:
        return 0
    a, b = _draw_pair(k, u)
    i, j = ones[a]
    ip, jp = ones[b]
    if i == ip or j == jp:
        return 0
    pos = state._pos
    if (i, jp) in pos or (ip, j) in pos:
        return 0
    w_i = wrows[i]
    w_ip = wrows[ip]
    move = w_ip[j] * w_i[jp]
    total = w_i[j] * w_ip[jp] + move
    if u() * total < move:
        state._apply_swap(a, b, i, j, ip, jp)
        return 2
    return 1


def propose_swap(state: BinaryMatrix, weights: WeightMatrix, rng) -> SwapProposal | None:
    """Sample one pair of 1-cells and report what a step would do with it.

    Read-only companion to `swap_step` for inspection and testing; the state
    is not modified.  Returns None when the matrix has fewer than two 1s and
    no pair can be drawn.
    """
    k = len(state.ones)
    if k < 2:
        return None
    stream = UniformStream(rng, block=2)
    a, b = _draw_pair(k, stream.u)
    first, second = state.ones[a], state.ones[b]
    (i, j), (ip, jp) = first, second
    pos = state._pos
    if i == ip or j == jp or (i, jp) in pos or (ip, j) in pos:
        return SwapProposal((first, second), False, None)
    return SwapProposal((first, second), True, swap_probability(weights, i, j, ip, jp))


def swap_step(state: BinaryMatrix, weights: WeightMatrix, rng) -> str:
    """Run one weighted swap proposal, mutating `state` in place.

    Returns one of "no-checkerboard", "rejected", "swapped".  The caller is
    responsible for `state` being compatible with `weights`; a matrix with
    fewer than two 1s can never move and every proposal reports
    "no-checkerboard".
    """
    return _OUTCOMES[_step(state, weights._rows, UniformStream(rng, block=4).u)]
