"""n = 1 walkthrough: the weight-4 singular vector, its remainder, and the
decoupling relations for j^3, j^4 and j^5.

    python notebooks/n1_walkthrough.py
"""
from voa.fock import format_state
from voa.w1inf import (
    construct_dij, decoupling, find_singular, pi_project, raise_decoupling, remainder,
)

# Scan M_{-1} for singular vectors; the first one shows up at weight 4.
for w in range(1, 5):
    print(f"weight {w}: {len(find_singular(1, w))} singular vector(s)")

(v,) = find_singular(1, 4)
print("\nnormalized singular vector:")
print(" ", format_state(v.normalized()))

# The same vector as a normally ordered polynomial in the Omegas, split by degree.
D = construct_dij(1, (0, 1), (0, 1))
for deg, part in sorted(D.decomposition.items(), reverse=True):
    print(f"  D^{deg} = {part}")
assert D.state().normalized() == v.normalized()
print("projection to beta-gamma vanishes:", pi_project(v, 1).is_zero())

R, m = remainder(D)
print(f"\nremainder: {R} J^{m}")

# A nonzero remainder lets us solve for j^3, then apply the raising operator.
rel = decoupling(1)
print(f"\n{rel!r}   verified={rel.verify()}")
for _ in range(2):
    rel = raise_decoupling(1, rel)
    print(f"j^{rel.r} = ...   generators={sorted(rel.generators())}   verified={rel.verify()}")
