"""Zhu's algebra of M_c: the * and o products, reduction to C[a^0, a^1, ...],
C2 leading terms, and the relation in the Zhu algebra of W_{1+inf,-n}.

Reduction rules, for a state a of weight m:

  (ii)  a o |0> = d a + m a lies in O(V), so pi(d a) = -m pi(a);
  (iii) a * v = sum_j C(m,j) a(j-1) v, so
        pi(a(-1) v) = pi(a) pi(v) - sum_{j>=1} C(m,j) pi(a(j-1) v).

Rule (i), g(-k) = (1/(k-1)!) (d^{k-1} g)(-1), turns each PBW word into an
iterated (-1) product, and the correction terms have lower weight.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .fock import CurrentSystem, FockState, apply_mode, as_expr
from .poly import Poly, format_mono, format_poly, mono_degree


def a(l):
    return Poly.var(("a", l))


def mono_weight(m):
    return sum((v[1] + 1) * e for v, e in m)


def deglex_key(m):
    """Sort key: larger key = larger monomial (total degree, then exponents
    compared from the highest variable down, with a^l < a^{l+1})."""
    exps = sorted(((v[1], e) for v, e in m), reverse=True)
    return (mono_degree(m), exps)


class ZhuPoly(Poly):
    """Polynomial in the commuting a^l, with wt(a^l) = l+1."""

    __slots__ = ()

    @classmethod
    def of(cls, p):
        return cls(p.terms)

    def weight(self):
        return max((mono_weight(m) for m in self.terms), default=-1)

    def symb(self):
        """Top weight component."""
        w = self.weight()
        return ZhuPoly({m: c for m, c in self.terms.items() if mono_weight(m) == w})

    def leading(self):
        """Degree-lex leading monomial with its coefficient."""
        if not self.terms:
            return ZhuPoly()
        m = max(self.terms, key=deglex_key)
        return ZhuPoly({m: self.terms[m]})

    def indices(self):
        return sorted({v[1] for m in self.terms for v, _ in m})

    def __repr__(self):
        return format_poly(self, key=lambda m: _neg_key(deglex_key(m)))


def _neg_key(k):
    return (-k[0], [(-l, -e) for l, e in k[1]])


def _need_current(v):
    if not isinstance(v.system, CurrentSystem):
        raise ValueError("Zhu reduction is implemented for M_c")


def _homog_weight(u):
    ws = u.weights()
    if len(ws) != 1:
        raise ValueError(f"u must be weight-homogeneous (weights {ws})")
    return ws[0]


def zhu_star(u, v):
    """u * v = sum_{j>=0} C(m,j) u(j-1) v, m = wt u."""
    m = _homog_weight(u)
    e = as_expr(u)
    out = FockState(v.system)
    for j in range(m + 1):
        out = out + comb(m, j) * apply_mode(v.system, e, j - 1, v)
    return out


def zhu_circ(u, v):
    """u o v = sum_{j>=0} C(m,j) u(j-2) v."""
    m = _homog_weight(u)
    e = as_expr(u)
    out = FockState(v.system)
    for j in range(m + 1):
        out = out + comb(m, j) * apply_mode(v.system, e, j - 2, v)
    return out


def _reduce_word(sysm, word):
    memo = sysm._fmemo.setdefault("zhu", {})
    hit = memo.get(word)
    if hit is not None:
        return hit
    if not word:
        res = Poly.const(1)
    else:
        (l, mode), rest = word[0], word[1:]
        k = -mode - 1
        m = l + 1 + k
        # pi(d^k J^l / k!) = (-1)^k (l+1)...(l+k) / k! a^l
        f = Fraction((-1) ** k * factorial(l + k), factorial(l) * factorial(k))
        res = a(l) * _reduce_word(sysm, rest) * f
        for j in range(1, m + 1):
            # (d^k J^l / k!)(j-1) = (-1)^k C(j-1, k) J^l(j-1-k)
            cf = (-1) ** k * comb(j - 1, k) if j - 1 >= k else 0
            if not cf:
                continue
            img = sysm.apply_gen(l, j - 1 - k, rest)
            for w, c in img.items():
                res = res - _reduce_word(sysm, w) * (comb(m, j) * cf * c)
    memo[word] = res
    return res


def zhu_reduce(v):
    _need_current(v)
    out = Poly()
    for w, c in v.terms.items():
        out = out + _reduce_word(v.system, w) * c
    return ZhuPoly.of(out)


def c2_image(v):
    """Image in the C2 quotient: drop words with a mode g(-k), k >= 2."""
    _need_current(v)
    out = Poly()
    for w, c in v.terms.items():
        if all(m == -1 for _, m in w):
            term = Poly.const(c)
            for l, _ in w:
                term = term * a(l)
            out = out + term
    return ZhuPoly.of(out)


def leading_term(v):
    return c2_image(v).symb().leading()


def zhu_ideal_element(D):
    """The Zhu image of a lift D_{I,J} (an element of the ideal I_{-n})."""
    return zhu_reduce(D.state())


def _eliminate(p, g, l):
    """Remove a^l from p using g = lam a^l + (terms free of a^l), lam constant."""
    lam = Fraction(0)
    rest = Poly()
    for m, c in g.terms.items():
        if m == ((("a", l), 1),):
            lam = c
        elif any(v == ("a", l) for v, _ in m):
            raise ArithmeticError(f"a^{l} enters the eliminating element nonlinearly")
        else:
            rest = rest + Poly({m: c})
    if not lam:
        raise ArithmeticError(f"a^{l} does not appear linearly in the eliminating element")
    out = Poly()
    for m, c in p.terms.items():
        e = dict(m).get(("a", l), 0)
        if not e:
            out = out + Poly({m: c})
            continue
        others = tuple((v, x) for v, x in m if v != ("a", l))
        out = out + Poly({others: c}) * ((rest * Fraction(-1) * (1 / lam)) ** e)
    return out


class VarietyRelation:
    def __init__(self, n, lam, E, raw, poly):
        self.n = n
        self.lam = lam
        self.E = E
        self.raw = raw
        self.poly = poly

    @property
    def lt(self):
        return self.poly.symb().leading()

    def predicted_forms(self):
        n = self.n
        prod = [2 * k for k in range(n + 1)]
        f1 = [0, 0] + prod
        f2 = [1] + prod
        f3 = [2 * n + 2] + [2 * k for k in range(n)]
        return [_mono_from(idx) for idx in (f1, f2, f3)]

    def lt_form(self):
        """Index of the predicted form that matches the leading monomial, or None."""
        lt = self.lt
        (m,) = lt.terms
        for i, f in enumerate(self.predicted_forms()):
            if m == f:
                return i
        return None


def _mono_from(indices):
    d = {}
    for l in indices:
        d[("a", l)] = d.get(("a", l), 0) + 1
    return tuple(sorted(d.items()))


def variety_relation(n):
    """A nonzero element of I_{-n} in C[a^0..a^{n^2+2n-1}]."""
    from .w1inf import construct_dij, remainder

    l = n * n + 2 * n
    K = tuple(range(n + 1))
    J1 = tuple(range(n)) + (n + 2,)
    J2 = tuple(range(n - 1)) + (n, n + 1)
    D1, D2 = construct_dij(n, K, J1), construct_dij(n, K, J2)
    R1, m1 = remainder(D1)
    R2, m2 = remainder(D2)
    assert m1 == m2 == l + 2
    if not R1 and not R2:
        raise ArithmeticError("both remainders vanish; lambda solve is degenerate")
    # lam1 R1 + lam2 R2 = 0
    lam = (Fraction(1), -R1 / R2) if R2 else (Fraction(0), Fraction(1))
    E = lam[0] * D1.state() + lam[1] * D2.state()
    raw = zhu_reduce(E)
    if any(i > l + 1 for i in raw.indices()):
        raise ArithmeticError(f"relation still involves a^{max(raw.indices())}")
    g1 = zhu_ideal_element(construct_dij(n, K, tuple(range(n)) + (n + 1,)))
    g0 = zhu_ideal_element(construct_dij(n, K, K))
    p = _eliminate(raw, g1, l + 1)
    p = _eliminate(p, g0, l)
    p = ZhuPoly.of(p)
    if not p:
        raise ArithmeticError("eliminated relation is zero")
    if any(i >= l for i in p.indices()):
        raise ArithmeticError("elimination left a^l or higher")
    return VarietyRelation(n, lam, E, raw, p)


def format_zhu(p):
    return repr(ZhuPoly.of(p))


def format_lt(p):
    if not p.terms:
        return "0"
    (m,) = p.terms
    c = p.terms[m]
    return f"{c}*{format_mono(m)}"
