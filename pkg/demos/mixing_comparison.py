"""
How fast do the two chains forget their start?
==============================================

The swap chain moves at most two 1s per step; a curveball trade can
relocate many at once.  On larger matrices that difference shows up
directly in the effective sample size (ESS) of any statistic traced
along the run: more effective samples per iteration means faster
mixing.

Ten seeds per algorithm on a 20x20 problem, 10,000 iterations each.
"""

import numpy as np

from fixedmargin import WeightMatrix
from fixedmargin.chains import ChainConfig, random_binary_matrix, run_chain
from fixedmargin.stats import diagnose

start = random_binary_matrix(20, 20, 0.25, np.random.default_rng(42))
weights = WeightMatrix.all_ones(20, 20)
print(f"start: 20x20 with {int(start.row_sums.sum())} ones\n")

results = {}
for algorithm in ("swap", "curveball"):
    sizes = []
    for seed in range(10):
        config = ChainConfig(algorithm=algorithm, burn_in=0, thin=1,
                             retained=10_000, seed=seed,
                             statistics=("diag-divergence",))
        trace = run_chain(start, weights, config)
        report = diagnose(trace.values["diag-divergence"])
        sizes.append(report.ess)
    results[algorithm] = np.array(sizes)
    print(f"{algorithm:9s} ESS per seed: "
          + " ".join(f"{v:6.0f}" for v in sizes))

swap_mean = results["swap"].mean()
curveball_mean = results["curveball"].mean()
print(f"\nmean ESS: swap {swap_mean:.0f}, curveball {curveball_mean:.0f} "
      f"({curveball_mean / swap_mean:.1f}x)")
print("per retained sample the curveball chain simply carries more "
      "information, at a modestly higher cost per step")
