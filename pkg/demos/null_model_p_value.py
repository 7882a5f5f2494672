"""
An observed matrix against its margin-preserving null
=====================================================

The classic null-model question: is the structure in an observed 0/1
matrix surprising once its row and column sums are taken as given?  We
hold the margins fixed, sample the null with curveball trades, and read
off an empirical p-value for the C-score (pairwise row segregation).

The twist weights add: the same observed matrix can be ordinary under
one null and extreme under another.  A weighted null that already
favors the observed block structure absorbs the signal.
"""

import numpy as np

from fixedmargin import BinaryMatrix, WeightMatrix
from fixedmargin.chains import ChainConfig, run_chain
from fixedmargin.stats import c_score, empirical_p_value

# two pairs of identical rows: maximal segregation for these margins
observed = BinaryMatrix([[1, 1, 0, 0],
                         [1, 1, 0, 0],
                         [0, 0, 1, 1],
                         [0, 0, 1, 1]])
observed_value = c_score(observed)
print(f"observed C-score: {observed_value:.4f}")

nulls = {
    "uniform": WeightMatrix.all_ones(4, 4),
    "block-favoring": WeightMatrix([[5, 5, 1, 1],
                                    [5, 5, 1, 1],
                                    [1, 1, 5, 5],
                                    [1, 1, 5, 5]]),
}

for label, weights in nulls.items():
    config = ChainConfig(algorithm="curveball", burn_in=1_000, thin=100,
                         retained=3_000, seed=9, statistics=("c-score",))
    null_values = run_chain(observed, weights, config).values["c-score"]
    p_value = empirical_p_value(observed_value, null_values, tail="upper")
    print(f"\n{label} null:")
    print(f"  null C-score mean {null_values.mean():.4f}, "
          f"sd {null_values.std():.4f}")
    values, counts = np.unique(null_values, return_counts=True)
    for value, count in zip(values, counts):
        print(f"    C = {value:.4f}: {count / len(null_values):6.1%}")
    print(f"  upper-tail p-value: {p_value:.4f}")

print("\nunder the uniform null the observed segregation is a modest "
      "outlier; under weights that favor the blocks it is typical")
