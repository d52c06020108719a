"""Weyl's invariant ring for GL_n: the quadratics q_{a,b}, the determinants
d_{I,J}, and the symbol map from filtered states to polynomials."""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import comb, factorial

from .fock import BetaGammaSystem, CurrentSystem, FockState
from .poly import Poly


def Q(a, b):
    return Poly.var(("Q", a, b))


def q_gen(a, b, n):
    """q_{a,b} = sum_i x_{i,a} x'_{i,b}, indices i = 1..n."""
    out = Poly()
    for i in range(1, n + 1):
        out = out + Poly.var(("x", i, a)) * Poly.var(("y", i, b))
    return out


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def check_index_lists(I, J):
    I, J = tuple(int(i) for i in I), tuple(int(j) for j in J)
    if len(I) != len(J) or not I:
        raise ValueError("I and J must be non-empty and of equal length")
    for L in (I, J):
        if any(x < 0 for x in L) or any(L[r] >= L[r + 1] for r in range(len(L) - 1)):
            raise ValueError(f"index list {L} must be strictly increasing and nonnegative")
    return I, J


def det_dij(I, J, strict=True):
    """Leibniz expansion of det[Q_{i_r, j_s}] (rows I, columns J)."""
    if strict:
        I, J = check_index_lists(I, J)
    elif len(I) != len(J):
        raise ValueError("I and J must have equal length")
    out = Poly()
    for p in permutations(range(len(J))):
        term = Poly.const(_perm_sign(p))
        for r, s in enumerate(p):
            term = term * Q(I[r], J[s])
        out = out + term
    return out


def classical_subst(P, n):
    """The homomorphism C[Q_{a,b}] -> Sym(...)^{GL_n}, Q_{a,b} -> q_{a,b}."""
    return P.subs(lambda v: q_gen(v[1], v[2], n) if v[0] == "Q" else Poly.var(v))


def d_Q(P):
    """The derivation with dQ_{a,b} = Q_{a+1,b} + Q_{a,b+1}."""
    out = Poly()
    for m, c in P.terms.items():
        for idx, (v, e) in enumerate(m):
            rest = dict(m)
            if e == 1:
                del rest[v]
            else:
                rest[v] = e - 1
            base = Poly({tuple(sorted(rest.items())): c * e})
            out = out + base * (Q(v[1] + 1, v[2]) + Q(v[1], v[2] + 1))
    return out


def _mode_symbol(system, mode):
    g, m = mode
    k = -m - 1
    f = Fraction(1, factorial(k))
    if isinstance(system, CurrentSystem):
        # d^k J^l = d^k Q_{l,0} = sum_j C(k,j) Q_{l+j,k-j}
        out = Poly()
        for j in range(k + 1):
            out = out + Q(g + j, k - j) * comb(k, j)
        return out * f
    name, i = system.gen_label(g)
    return Poly.var(("x" if name == "beta" else "y", i + 1, k)) * f


def word_symbol(system, word):
    out = Poly.const(1)
    for x in word:
        out = out * _mode_symbol(system, x)
    return out


def filtration_unit(system):
    """Filtration degree carried by one generator mode."""
    return 2 if isinstance(system, CurrentSystem) else 1


def symbol(v: FockState, r=None):
    """Image of v in the degree-r piece of the associated graded.

    For M_c the result is a polynomial in Q_{a,b} (each J has degree 2); for
    beta-gamma it is a polynomial in x_{i,k}, x'_{i,k}.
    """
    system = v.system
    if not isinstance(system, (CurrentSystem, BetaGammaSystem)):
        raise ValueError(f"no symbol map for {system}")
    unit = filtration_unit(system)
    top = v.degree * unit
    if r is None:
        r = max(top, 0)
    if top > r:
        raise ValueError(f"state has filtration degree {top} > {r}")
    if r % unit:
        return Poly()
    nmodes = r // unit
    out = Poly()
    for w, c in v.terms.items():
        if len(w) == nmodes:
            out = out + word_symbol(system, w) * c
    return out
