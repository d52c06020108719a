"""Exact sparse linear algebra over Q, on top of sympy's DomainMatrix."""
from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.sdm import SDM


def _qq(x):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _frac(q):
    return Fraction(int(QQ.numer(q)), int(QQ.denom(q)))


def sparse_matrix(rows, ncols):
    """rows: iterable of {col: value}."""
    data = {}
    nrows = 0
    for i, r in enumerate(rows):
        nrows = i + 1
        rr = {j: _qq(v) for j, v in r.items() if v}
        if rr:
            data[i] = rr
    return DomainMatrix.from_rep(SDM(data, (nrows, ncols), QQ))


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}, as lists of Fractions in reduced echelon form."""
    if ncols == 0:
        return []
    rows = list(rows)
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    A = sparse_matrix(rows, ncols)
    rref, pivots = A.rref()
    piv = set(pivots)
    rr = rref.to_sdm()
    free = [j for j in range(ncols) if j not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            val = rr.get(i, {}).get(f)
            if val:
                v[p] = -_frac(val)
        out.append(v)
    return out


def solve(columns, target, ncoords=None):
    """Find x with sum_j x_j columns[j] = target (all given as {coord: value}).

    Columns are expected to be independent; returns None when target is
    outside their span.
    """
    coords = {}
    for col in list(columns) + [target]:
        for k in col:
            if k not in coords:
                coords[k] = len(coords)
    ncol = len(columns)
    rows = [dict() for _ in coords]
    for j, col in enumerate(columns):
        for k, v in col.items():
            if v:
                rows[coords[k]][j] = v
    for k, v in target.items():
        if v:
            rows[coords[k]][ncol] = v
    A = sparse_matrix(rows, ncol + 1)
    rref, pivots = A.rref()
    if ncol in pivots:
        return None
    rr = rref.to_sdm()
    x = [Fraction(0)] * ncol
    for i, p in enumerate(pivots):
        val = rr.get(i, {}).get(ncol)
        if val:
            x[p] = _frac(val)
    return x


def rank(rows, ncols):
    rows = list(rows)
    if not rows or not ncols:
        return 0
    return len(sparse_matrix(rows, ncols).rref()[1])
