"""Sparse commutative polynomials with Fraction coefficients.

Variables are hashable tuples such as ("Q", a, b), ("x", i, k), ("y", i, k)
(for x'_{i,k}) or ("a", l).  A monomial is a sorted tuple of (var, exp).
"""
from __future__ import annotations

from fractions import Fraction


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[m] = self.terms.get(m, 0) + c
        self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def var(cls, v):
        return cls({((v, 1),): 1})

    @classmethod
    def const(cls, c):
        return cls({(): c})

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = Fraction(other)
            return Poly({m: s * c for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((mono_degree(m) for m in self.terms), default=-1)

    def homogeneous_part(self, d):
        return Poly({m: c for m, c in self.terms.items() if mono_degree(m) == d})

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def subs(self, mapping):
        """Ring homomorphism sending each variable v to mapping(v) (a Poly)."""
        cache = {}
        out = Poly()
        for m, c in self.terms.items():
            acc = Poly.const(c)
            for v, e in m:
                if v not in cache:
                    cache[v] = mapping(v)
                acc = acc * cache[v] ** e
            out = out + acc
        return out

    def __repr__(self):
        return format_poly(self)


def format_var(v):
    if v[0] == "Q":
        return f"Q{v[1]}{v[2]}" if max(v[1:]) < 10 else f"Q_{{{v[1]},{v[2]}}}"
    if v[0] == "x":
        return f"x_{v[1]},{v[2]}"
    if v[0] == "y":
        return f"x'_{v[1]},{v[2]}"
    if v[0] == "a":
        return f"a^{v[1]}"
    return str(v)


def format_mono(m):
    parts = []
    for v, e in m:
        s = format_var(v)
        parts.append(f"({s})^{e}" if e > 1 else s)
    return "*".join(parts) if parts else "1"


def format_poly(p, key=None):
    if not p.terms:
        return "0"
    mons = sorted(p.terms, key=key or (lambda m: (-mono_degree(m), m)))
    out = []
    for m in mons:
        c = p.terms[m]
        out.append(f"{c}*{format_mono(m)}" if m else f"{c}")
    return " + ".join(out)


def poly_to_json(p):
    return [{"coeff": str(p.terms[m]), "mono": [[list(v), e] for v, e in m]}
            for m in sorted(p.terms, key=lambda m: (-mono_degree(m), m))]


def poly_from_json(data):
    t = {}
    for item in data:
        m = tuple(sorted((tuple(v), e) for v, e in item["mono"]))
        t[m] = Fraction(item["coeff"])
    return Poly(t)
