"""
Structural zeros: when the chain can no longer reach everything
===============================================================

A zero weight forbids a cell outright.  Two very different things can
happen to the state space:

* a "staircase" (monotonic) zero pattern leaves the swap chain
  irreducible, with the diameter bounded by half the largest pairwise
  Hamming distance;
* other patterns can split the space into pieces no swap or trade ever
  crosses, silently biasing every downstream estimate.

This script shows one pattern of each kind on small spaces where the
exact graph can be inspected.
"""

import numpy as np

from fixedmargin import WeightMatrix
from fixedmargin.chains import random_binary_matrix, with_corner_zeros
from fixedmargin.matrices import is_monotonic
from fixedmargin.oracle import connectivity, diameter, enumerate_space

rng = np.random.default_rng(5)

# -- a hollow matrix: zeros on the diagonal --------------------------------
# With unit margins the only legal states are the two 3-cycles, and
# turning one into the other would need a swap through a forbidden cell.
hollow = WeightMatrix(np.ones((3, 3)) - np.eye(3))
report = is_monotonic(hollow)
space = enumerate_space([1, 1, 1], [1, 1, 1], hollow)
components = connectivity(space, "swap")
print("hollow 3x3, unit margins")
print(f"  zero pattern monotonic: {report.is_monotonic}")
print(f"  states: {len(space)}, components under swap: {len(components)}")
for rank, members in enumerate(components):
    print(f"  component {rank}: states {members}")
print("  a chain started in either component never sees the other one\n")

# -- staircase zeros: forbidden cells packed into a corner -----------------
# Monotonic patterns are the safe case.  Drawing a few random staircase
# spaces, every one comes out connected and the diameter stays within
# the half-Hamming bound.
print("staircase corner zeros, random 5x5 margins")
for trial in range(4):
    weights = with_corner_zeros(WeightMatrix(np.exp(rng.normal(size=(5, 5)))), 0.2)
    matrix = random_binary_matrix(5, 5, 0.5, rng, weights=weights)
    space = enumerate_space(matrix.row_sums, matrix.col_sums, weights, cap=50_000)
    if len(space) < 2:
        continue
    components = connectivity(space, "swap")
    observed = diameter(space, "swap")
    flat = np.array([s.entries.ravel() for s in space.states], dtype=np.int16)
    worst = max(int(np.abs(flat[i + 1:] - flat[i]).sum(axis=1).max())
                for i in range(len(flat) - 1))
    print(f"  trial {trial}: {len(space):4d} states, {len(components)} component(s), "
          f"diameter {observed} <= bound {worst // 2}")
