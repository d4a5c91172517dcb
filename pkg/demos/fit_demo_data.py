"""
Fitting a two-component mixture to the bundled demo data
========================================================

The package ships a small CSV of 400 points drawn from two normal
components. We read it, split the sorted points into two blocks with the
dynamic-programming partition, and let EM refine the block moments.
"""

import numpy as np

import dpmix
from dpmix import formats
from dpmix.scoring import ScoringSpec

data = formats.read_points(dpmix.data_path())
print(f"{data.N} distinct points, total weight {data.total_weight:g}")

# The optimal two-block split under the within-block variance score
part, score = dpmix.dp_partition(data, 2, ScoringSpec("q1"))
print("block boundaries:", part.boundaries.tolist(), f"(score {score:.4f})")

# Block moments are the starting point for EM
init = dpmix.blocks_to_params(data, part)
res = dpmix.run_em(data, init, dpmix.SIMULATION_PROFILE)

np.set_printoptions(precision=4, suppress=True)
print("initial means:", init.means, " fitted means:", res.params.means)
print("fitted stds:  ", res.params.stds)
print("fitted weights:", res.params.weights)
print(f"log-likelihood {res.loglik:.4f} after {res.iterations} iterations")
