"""
Qutrits: two uses of a three-outcome instrument
===============================================

For a d-level system the instrument

    I_k[rho] = U_k sqrt(M_k) rho sqrt(M_k) U_k^dag,   M_k = (1-p)/d I + p |k><k|,

with ``U_k^dag`` mapping onto the mutually unbiased bases gives d^2 effects
after two uses.
"""

from seqtomo import collective_effects, condition_number, make_qudit_mub, optimize_family, scan_condition_number

for p in (0.0, 0.3, 0.69):
    es = collective_effects(make_qudit_mub(3, p), 2)
    print(f"p={p:.2f}: span rank {es.span_rank} of 9")

scan = scan_condition_number("qudit_mub", depth=2, grid_points=21, d=3)
for p, lam in scan.grid[::4]:
    print(f"  p={p:.3f}  Lambda={lam:.3f}")

res = optimize_family("qudit_mub", depth=2, d=3)
print(f"refined optimum: p*={res.best_p:.5f}  Lambda*={res.best_lambda:.5f}")
print(f"Lambda at p=0.69: {condition_number(make_qudit_mub(3, 0.69), 2):.5f}")

# Other prime dimensions use the Wootters-Fields bases.
for d in (2, 5, 7):
    print(f"d={d}: IC after two uses at p=0.5 ->", collective_effects(make_qudit_mub(d, 0.5), 2).is_ic)
