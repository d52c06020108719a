"""n = 2: the weight-9 element D_0 of the ideal and the j^8 decoupling.

The weight-9 space of M_{-2} has a few hundred PBW monomials; the scan and the
construction are still quick because everything is sparse and exact.
"""
import time

from voa.fock import weight_basis, get_system
from voa.w1inf import construct_dij, decoupling, find_singular, remainder

M = get_system("current", -2)
print("dim of weight-9 space:", len(weight_basis(M, 9)))

t = time.perf_counter()
dims = [len(find_singular(2, w)) for w in range(1, 10)]
print("singular dimensions w=1..9:", dims, f"({time.perf_counter() - t:.1f}s)")

D = construct_dij(2, (0, 1, 2), (0, 1, 2))
for deg, part in sorted(D.decomposition.items(), reverse=True):
    print(f"D^{deg}: {len(part.terms)} terms")
print("D^2 =", D.decomposition[2])

R, m = remainder(D)
print(f"remainder: {R} J^{m}")

rel = decoupling(2)
print(f"j^{rel.r} expressed through j^0..j^{max(rel.generators())}; verified={rel.verify()}")
