"""Zhu algebra side for n = 1: leading terms and a relation in C[a^0, a^1, a^2].

The relation comes from two weight-6 lifts whose remainders are balanced so the
J^5 terms cancel; a^4 and a^3 are then eliminated with lower ideal elements.
"""
from voa.fock import state_of
from voa.w1inf import Realization, build_omega, construct_dij
from voa.zhu import format_lt, format_zhu, leading_term, variety_relation, zhu_reduce

real = Realization("abstract", c=-1)
for k, l in [(0, 0), (1, 0), (0, 1), (2, 3)]:
    v = state_of(real.system, build_omega(k, l, real))
    print(f"LT(Omega_{k},{l}) = {format_lt(leading_term(v))}")

D0 = construct_dij(1, (0, 1), (0, 1))
print("LT(D_0) =", format_lt(leading_term(D0.state())))
print("Zhu image of D_0 =", format_zhu(zhu_reduce(D0.state())))

vr = variety_relation(1)
print("\nlambda =", ", ".join(str(x) for x in vr.lam))
print("relation =", format_zhu(vr.poly))
print("LT =", format_lt(vr.lt), "-> predicted form", vr.lt_form() + 1)
