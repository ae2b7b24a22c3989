"""
n qubits with one dichotomic apparatus
======================================

Measure the first qubit with a single-qubit instrument, then cyclically shift
the register so that a different qubit sits under the apparatus next time.
After 2n uses every qubit has been measured twice and the collective effects
factor into tensor products of single-qubit depth-2 effects.
"""

from seqtomo import ic_search, make_example2, make_nqubit_shift, min_depth_bound

base = make_example2(0.5)
for n in (1, 2, 3):
    instr = make_nqubit_shift(n, base)
    res = ic_search(instr, 2 * n, max_leaves=2 ** (2 * n))
    print(f"n={n}: lower bound {min_depth_bound(2, 2**n)}, first IC depth {res.first_ic_depth}, ranks {res.rank_per_depth}")
