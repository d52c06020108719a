"""Differential operators t^a d^l on the punctured line and the central cocycle.

A DiffOp is a finite sum  sum c_{a,l} t^a d^l  with a in Z, l >= 0.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial


def falling(x: int, i: int) -> int:
    """(x)_i = x (x-1) ... (x-i+1); works for negative x."""
    out = 1
    for s in range(i):
        out *= x - s
    return out


class DiffOp:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, c in dict(terms).items():
                c = Fraction(c)
                if c:
                    self.terms[(int(key[0]), int(key[1]))] = c

    @classmethod
    def mono(cls, a, l, coeff=1):
        return cls({(a, l): coeff})

    @classmethod
    def basis_J(cls, l, k, coeff=1):
        # the standard basis element J^l_k = -t^{l+k} d^l
        return cls({(l + k, l): -Fraction(coeff)})

    def to_J(self):
        """Coordinates in the J^l_k basis: {(l, k): coeff}."""
        return {(l, a - l): -c for (a, l), c in self.terms.items()}

    @classmethod
    def from_J(cls, coords):
        out = cls()
        for (l, k), c in coords.items():
            out = out + cls.basis_J(l, k, c)
        return out

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return DiffOp(t)

    def __neg__(self):
        return DiffOp({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        s = Fraction(s)
        return DiffOp({k: s * c for k, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, l), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            parts.append(f"{c}*t^{a}*d^{l}")
        return " + ".join(parts)

    def apply(self, k):
        """Apply to the monomial t^k; returns {exponent: coeff}."""
        out = {}
        for (a, l), c in self.terms.items():
            v = falling(k, l)
            if v:
                e = a + k - l
                out[e] = out.get(e, 0) + c * v
        return {e: v for e, v in out.items() if v}

    def apply_poly(self, p):
        out = {}
        for k, c in p.items():
            for e, v in self.apply(k).items():
                out[e] = out.get(e, 0) + c * v
        return {e: v for e, v in out.items() if v}


def compose(f: DiffOp, g: DiffOp) -> DiffOp:
    # d^l t^b = sum_i C(l,i) (b)_i t^{b-i} d^{l-i}
    out = {}
    for (a, l), c1 in f.terms.items():
        for (b, m), c2 in g.terms.items():
            for i in range(l + 1):
                v = comb(l, i) * falling(b, i)
                if v:
                    key = (a + b - i, l + m - i)
                    out[key] = out.get(key, 0) + c1 * c2 * v
    return DiffOp(out)


def _psi_mono(a, m, b, n):
    # f = t^a, g = t^b; Res f^{(n+1)} g^{(m)} picks a + b = m + n
    if a + b != m + n:
        return Fraction(0)
    r = falling(a, n + 1) * falling(b, m)
    return Fraction(factorial(m) * factorial(n) * r, factorial(m + n + 1))


def cocycle(f: DiffOp, g: DiffOp) -> Fraction:
    total = Fraction(0)
    for (a, m), c1 in f.terms.items():
        for (b, n), c2 in g.terms.items():
            total += c1 * c2 * _psi_mono(a, m, b, n)
    return total


def bracket(f: DiffOp, g: DiffOp) -> DiffOp:
    return compose(f, g) - compose(g, f)


def bracket_central(f: DiffOp, g: DiffOp, c) -> tuple[DiffOp, Fraction]:
    return bracket(f, g), Fraction(c) * cocycle(f, g)


T = DiffOp.mono(1, 0)
D = DiffOp.mono(0, 1)
ONE = DiffOp.mono(0, 0)
