"""
Two uses of a dichotomic qubit instrument
=========================================

A two-outcome measurement on a qubit can never be informationally complete on
its own: two effects cannot span the four-dimensional operator space. Using
the *same* apparatus twice gives four outcome sequences, and for the two
built-in families that is enough.
"""

import numpy as np

from seqtomo import collective_effects, gram_report, make_example1, optimize_family

# One use: two effects, span rank 2.
one = collective_effects(make_example1(0.5), 1)
print("example1, one use :", one.span_rank, "of 4")

# Two uses: four effects, linearly independent for 0 < p < 1.
two = collective_effects(make_example1(0.5), 2)
print("example1, two uses:", two.span_rank, "of 4")
# Pauli coefficients (I, X, Y, Z) of each effect, c = tr(E sigma) / 2.
paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
for index, E in two.as_dict().items():
    coeffs = [np.trace(E @ s).real / 2 for s in paulis]
    print(index, np.round(coeffs, 4))

# Robustness of the linear reconstruction is measured by the Gram condition number.
for p in (0.3, 2 / 3, 0.9):
    rep = gram_report(collective_effects(make_example1(p), 2))
    print(f"example1 p={p:.3f}  Lambda={rep.condition_number:.4f}")

# Scan and refine the parameter for both families.
for family in ("example1", "example2"):
    res = optimize_family(family, depth=2)
    print(f"{family}: p*={res.best_p:.6f}  Lambda*={res.best_lambda:.6f}  ({res.refinement_iterations} golden-section steps)")
