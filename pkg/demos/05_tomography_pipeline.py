"""
Simulated tomography
====================

Draw measurement trajectories from an unknown state, invert the frequencies,
and watch the error shrink as the number of shots grows.
"""

import numpy as np

from seqtomo import (
    DensityOperator,
    collective_effects,
    make_example2,
    reconstruct,
    sample_trajectories,
    trace_distance,
)

instr = make_example2(1 / np.sqrt(2))
effects = collective_effects(instr, 2)
truth = DensityOperator.random(2, np.random.default_rng(7))

for shots in (10**3, 10**4, 10**5, 10**6):
    errors = []
    for seed in range(10):
        batch = sample_trajectories(instr, 2, truth, shots, seed)
        est = reconstruct(effects, batch.frequencies()).estimate
        errors.append(trace_distance(est, truth))
    print(f"shots={shots:>8}  median trace distance {np.median(errors):.2e}")

batch = sample_trajectories(instr, 2, truth, 10**5, seed=42)
print(batch.to_json())
