"""
Instruments that never become informationally complete
=======================================================

Sharp (projective) instruments and two-outcome Lüders instruments stay
informationally incomplete however often they are repeated. We check this by
tracking the span rank of the collective effects as the depth grows.
"""

import numpy as np

from seqtomo import ic_search, make_example2, make_luders, make_projective
from seqtomo.instrument import QuantumOperation
from seqtomo.linalg import random_unitary

rng = np.random.default_rng(1)

E1 = np.diag([0.3, 0.7])
luders = make_luders([E1, np.eye(2) - E1])
print("Lüders, E1 = diag(0.3, 0.7):", ic_search(luders, 6))

# Every collective effect is a product E1^n1 E2^n2, so all of them commute with E1.
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
sharp = make_projective([P0, P1])
print("sigma_z projective         :", ic_search(sharp, 6))

# Scrambling the post-measurement state with random unitaries does not help.
chans = [QuantumOperation([random_unitary(2, rng)]) for _ in range(2)]
print("with random unitary channels:", ic_search(make_projective([P0, P1], chans), 6))

# Compare with an instrument that does work.
print("example2, p = 0.5          :", ic_search(make_example2(0.5), 6))
