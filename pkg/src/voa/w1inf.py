"""The W_{1+inf} layer: generators J^l and Omega_{a,b}, the free-field maps,
singular vectors, the lifts D_{I,J}, remainders and decoupling relations."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial

from . import linalg
from .diffop import falling
from .fock import (
    BCSystem, BetaGammaSystem, CurrentSystem, Circ, Deriv, FockState, Gen, Lin,
    StateField, VAC, Vac, Wick, _expr_weight, circle, get_system, state_of,
    weight_basis, wick, word_expr,
)
from .invariant import check_index_lists, classical_subst, det_dij, symbol
from .poly import Poly, mono_degree

ZERO = Lin([])


def is_zero_expr(e):
    return isinstance(e, Lin) and not e.terms


def mk_wick(a, b):
    if is_zero_expr(a) or is_zero_expr(b):
        return ZERO
    if isinstance(a, Vac):
        return b
    return Wick(a, b)


def mk_deriv(k, e):
    if is_zero_expr(e) or k == 0:
        return e
    if isinstance(e, Vac):
        return ZERO
    return Deriv(k, e)


def substitute(e, f):
    """Replace every generator leaf g by f(g) (None keeps g)."""
    if isinstance(e, Gen):
        r = f(e)
        return e if r is None else r
    if isinstance(e, Deriv):
        return mk_deriv(e.k, substitute(e.e, f))
    if isinstance(e, Wick):
        return mk_wick(substitute(e.a, f), substitute(e.b, f))
    if isinstance(e, Lin):
        return Lin.of([(c, substitute(t, f)) for c, t in e.terms])
    if isinstance(e, Vac):
        return e
    if isinstance(e, Circ):
        return Circ(e.n, substitute(e.a, f), substitute(e.b, f))
    raise TypeError(f"cannot substitute into {e!r}")


def gens_in(e, acc=None):
    acc = set() if acc is None else acc
    if isinstance(e, Gen):
        acc.add((e.name, e.index))
    elif isinstance(e, Deriv):
        gens_in(e.e, acc)
    elif isinstance(e, (Wick, Circ)):
        gens_in(e.a, acc)
        gens_in(e.b, acc)
    elif isinstance(e, Lin):
        for _, t in e.terms:
            gens_in(t, acc)
    return acc


# ---------------------------------------------------------------- realizations

class Realization:
    """Where J^l and Omega_{a,b} are evaluated: abstract M_c, beta-gamma, or bc."""

    def __init__(self, kind, n=None, c=None):
        self.kind = kind
        if kind == "abstract":
            self.c = Fraction(c)
            self.system = get_system("current", self.c)
        elif kind == "betagamma":
            self.n = int(n)
            self.system = get_system("betagamma", self.n)
        elif kind == "bc":
            self.n = int(n)
            self.system = get_system("bc", self.n)
        else:
            raise ValueError(kind)

    @classmethod
    def for_system(cls, system):
        if isinstance(system, CurrentSystem):
            return cls("abstract", c=system.c)
        if isinstance(system, BetaGammaSystem):
            return cls("betagamma", n=system.n)
        return cls("bc", n=system.n)

    def j(self, l):
        return build_j(l, self)

    def omega(self, a, b):
        return build_omega(a, b, self)


def build_j(l, real):
    if real.kind == "abstract":
        return Gen("J", l)
    if real.kind == "betagamma":
        return Lin([(1, Wick(Gen("gamma", i), mk_deriv(l, Gen("beta", i)))) for i in range(real.n)])
    return Lin([(1, Wick(Gen("c", i), mk_deriv(l, Gen("b", i)))) for i in range(real.n)])


def build_omega(a, b, real):
    if real.kind == "betagamma":
        return Lin([(1, Wick(mk_deriv(a, Gen("beta", i)), mk_deriv(b, Gen("gamma", i))))
                    for i in range(real.n)])
    m = a + b
    cs = omega_in_j_basis(a, b)
    return Lin.of([(cs[i], mk_deriv(i, build_j(m - i, real))) for i in range(m + 1) if cs[i]])


@lru_cache(maxsize=None)
def omega_in_j_basis(a, b):
    """(c_0..c_m) with omega_{a,b} = sum_i c_i d^i j^{m-i}, solved in rank-1 beta-gamma."""
    m = a + b
    real = Realization("betagamma", n=1)
    sysm = real.system
    cols = [state_of(sysm, mk_deriv(i, build_j(m - i, real))).terms for i in range(m + 1)]
    target = state_of(sysm, build_omega(a, b, real)).terms
    x = linalg.solve(cols, target)
    if x is None:
        raise ArithmeticError(f"omega_{a},{b} not in the span of d^i j^(m-i)")
    return tuple(x)


@lru_cache(maxsize=None)
def j_in_omega_basis(i, l):
    """d^i J^l in the Omega basis of A_{i+l}: {(a, b): coeff}."""
    # d Omega_{a,b} = Omega_{a+1,b} + Omega_{a,b+1} and J^l = Omega_{l,0}
    return {(l + j, i - j): Fraction(comb(i, j)) for j in range(i + 1)}


class AmSpace:
    def __init__(self, m):
        self.m = m
        self.omega_basis = [(a, m - a) for a in range(m, -1, -1)]
        self.j_basis = [(i, m - i) for i in range(m + 1)]  # (i, l): d^i J^l

    def __len__(self):
        return self.m + 1

    def change_matrix(self):
        """Rows: Omega_{a,b} in coordinates (c_0..c_m) of d^i J^{m-i}."""
        return [list(omega_in_j_basis(a, b)) for a, b in self.omega_basis]

    def check(self, c=-1):
        """Verify both sets span the same (m+1)-dim space and A_m = dA_{m-1} + <J^m>."""
        sysm = get_system("current", c)
        real = Realization("abstract", c=c)
        om = [state_of(sysm, build_omega(a, b, real)).terms for a, b in self.omega_basis]
        jb = [state_of(sysm, mk_deriv(i, Gen("J", l))).terms for i, l in self.j_basis]
        r_om = _rank_states(om)
        r_j = _rank_states(jb)
        r_all = _rank_states(om + jb)
        deriv_part = [state_of(sysm, mk_deriv(1, build_omega(a, b, real))).terms
                      for a, b in AmSpace(self.m - 1).omega_basis] if self.m else []
        r_split = _rank_states(deriv_part + [jb[0]])
        return r_om == r_j == r_all == r_split == self.m + 1


def _rank_states(states):
    idx = {}
    rows = []
    for s in states:
        for w in s:
            idx.setdefault(w, len(idx))
    for s in states:
        rows.append({idx[w]: c for w, c in s.items()})
    # rank of the matrix with these vectors as rows
    return linalg.rank(rows, len(idx))


# ---------------------------------------------------------------- normally ordered polynomials

def _factor_weight(f):
    if f[0] == "O":
        return f[1] + f[2] + 1 + f[3]
    return f[1] + 1 + f[2]


def fmt_factor(f):
    d = "" if not f[-1] else ("∂" if f[-1] == 1 else f"∂^{f[-1]}")
    if f[0] == "O":
        return f"{d}Ω_{{{f[1]},{f[2]}}}"
    return f"{d}J^{f[1]}"


class NOPoly:
    """Sum of right-nested normally ordered monomials.

    A monomial is a tuple of factors ("O", a, b, k) = d^k Omega_{a,b} or
    ("J", l, k) = d^k J^l; the empty tuple is the vacuum.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                t[m] = t.get(m, 0) + c
        self.terms = {m: c for m, c in t.items() if c}

    @classmethod
    def omega(cls, a, b, k=0):
        return cls({(("O", a, b, k),): 1})

    @classmethod
    def J(cls, l, k=0):
        return cls({(("J", l, k),): 1})

    def __add__(self, other):
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return NOPoly(t)

    def __neg__(self):
        return NOPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        s = Fraction(s)
        return NOPoly({m: s * c for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, NOPoly) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        """Number of factors (the filtration degree is twice this)."""
        return max((len(m) for m in self.terms), default=-1)

    def part(self, k):
        return NOPoly({m: c for m, c in self.terms.items() if len(m) == k})

    def weights(self):
        return sorted({sum(_factor_weight(f) for f in m) for m in self.terms})

    def factor_weights(self):
        return {_factor_weight(f) for m in self.terms for f in m}

    def to_expr(self, real):
        pairs = []
        for m, c in self.terms.items():
            parts = []
            for f in m:
                base = build_omega(f[1], f[2], real) if f[0] == "O" else build_j(f[1], real)
                parts.append(mk_deriv(f[-1], base))
            pairs.append((c, wick(*parts)))
        return Lin.of(pairs)

    def state(self, real):
        return state_of(real.system, self.to_expr(real))

    def in_j_basis(self):
        """For a degree-1 polynomial: {(i, l): coeff} in the basis d^i J^l."""
        out = {}
        for m, c in self.terms.items():
            if len(m) != 1:
                raise ValueError("in_j_basis needs a linear polynomial")
            f = m[0]
            if f[0] == "J":
                key = (f[2], f[1])
                out[key] = out.get(key, 0) + c
                continue
            a, b, k = f[1], f[2], f[3]
            cs = omega_in_j_basis(a, b)
            for i, ci in enumerate(cs):
                if ci:
                    key = (i + k, a + b - i)
                    out[key] = out.get(key, 0) + c * ci
        return {k: v for k, v in out.items() if v}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (-len(m), m)):
            c = self.terms[m]
            if not m:
                body = "1"
            elif len(m) == 1:
                body = fmt_factor(m[0])
            else:
                body = ":" + " ".join(fmt_factor(f) for f in m) + ":"
            parts.append(f"{c}·{body}")
        return " + ".join(parts)


def canonical_order(Pq, order="lex"):
    """Normal ordering of a polynomial in Q_{a,b}: factors sorted by (a, b)."""
    out = {}
    for mono, c in Pq.terms.items():
        facs = []
        for v, e in mono:
            facs.extend([(v[1], v[2])] * e)
        facs.sort(reverse=(order == "revlex"))
        key = tuple(("O", a, b, 0) for a, b in facs)
        out[key] = out.get(key, 0) + c
    return NOPoly(out)


def nopoly_symbol(P, deg):
    """Symbol of the degree-deg part as a polynomial in Q_{a,b} (via dQ)."""
    from .invariant import Q, d_Q
    out = Poly()
    for m, c in P.terms.items():
        if len(m) != deg:
            continue
        term = Poly.const(c)
        for f in m:
            if f[0] == "O":
                x = Q(f[1], f[2])
            else:
                x = Q(f[1], 0)
            for _ in range(f[-1]):
                x = d_Q(x)
            term = term * x
        out = out + term
    return out


# ---------------------------------------------------------------- projection

def bg_realization(n):
    return Realization("betagamma", n=n)


def pi_project(P, n, target="betagamma"):
    """Image in the free-field algebra (beta-gamma rank n, or bc rank n)."""
    real = Realization(target, n=n)
    if isinstance(P, NOPoly):
        return P.state(real)
    if isinstance(P, FockState):
        src = P.system
        out = {}
        for w, c in P.terms.items():
            e = substitute(word_expr(src, w), lambda g: build_j(g.index, real))
            for ww, cc in state_of(real.system, e).terms.items():
                v = out.get(ww, 0) + c * cc
                if v:
                    out[ww] = v
                else:
                    out.pop(ww, None)
        return FockState(real.system, out)
    # a field expression over J^l
    e = substitute(P, lambda g: build_j(g.index, real) if g.name == "J" else None)
    return state_of(real.system, e)


# ---------------------------------------------------------------- singular vectors

def singular_conditions(system, w, exhaustive=False):
    ls = range(0, w + 1) if exhaustive else range(0, 3)
    return [(l, k) for l in ls for k in range(l + 1, l + w + 1)]


def find_singular(n=None, w=0, c=None, exhaustive=False):
    """Basis of weight-w singular vectors in M_c (c = -n by default), vacuum excluded."""
    if c is None:
        c = -n
    sysm = get_system("current", c)
    words = weight_basis(sysm, w)
    if w == 0:
        return []
    rows = {}
    for col, word in enumerate(words):
        for l, k in singular_conditions(sysm, w, exhaustive):
            img = sysm.apply_gen(l, k, word)
            for tw, v in img.items():
                rows.setdefault((l, k, tw), {})[col] = v
    null = linalg.nullspace(list(rows.values()), len(words))
    out = []
    for vec in null:
        out.append(FockState(sysm, {words[i]: x for i, x in enumerate(vec) if x}))
    return out


def is_singular(v, upto=None):
    sysm = v.system
    w = v.weight
    upto = w if upto is None else upto
    for l in range(0, 3):
        for k in range(l + 1, l + upto + 1):
            if circle(sysm, Gen("J", l), k, v):
                return False
    return True


# ---------------------------------------------------------------- D_{I,J}

def q_monomials(deg, weight):
    """Multisets of (a, b) with |multiset| = deg and sum (a+b+1) = weight."""
    if deg == 0:
        return [()] if weight == 0 else []
    pairs = [(a, s - 1 - a) for s in range(1, weight - deg + 2) for a in range(s)]
    pairs.sort()
    out = []
    for combo in combinations_with_replacement(pairs, deg):
        if sum(a + b + 1 for a, b in combo) == weight:
            out.append(combo)
    return out


def _q_poly(combo):
    from .invariant import Q
    p = Poly.const(1)
    for a, b in combo:
        p = p * Q(a, b)
    return p


def peel_candidates(k, weight, order="lex"):
    """Monomials used when peeling degree k: products of Omegas, except that the
    linear part is written in the basis d Omega_{a,b} (a+b = weight-2) plus J^{weight-1}."""
    if k == 0:
        return [NOPoly({(): 1})] if weight == 0 else []
    if k == 1:
        m = weight - 1
        return [NOPoly.omega(a, m - 1 - a, 1) for a in range(m)] + [NOPoly.J(m)]
    return [canonical_order(_q_poly(mo), order) for mo in q_monomials(k, weight)]


def express_as_nopoly(v, d, n, order="lex"):
    """Write an invariant beta-gamma state as pi of a normally ordered polynomial
    in Omega of degree <= d, peeling off the top symbol each round."""
    real = bg_realization(n)
    out = NOPoly()
    rest = v
    while rest.terms:
        r = rest.degree
        if r % 2 or r // 2 > d:
            raise ValueError(f"state of degree {r} is outside the span of degree <= {d} monomials")
        k = r // 2
        wts = rest.weights()
        if len(wts) != 1:
            raise ValueError("state must be weight-homogeneous")
        top = symbol(rest.part(r), r)
        cands = peel_candidates(k, wts[0], order)
        cols = [classical_subst(nopoly_symbol(P, k), n).terms for P in cands]
        x = linalg.solve(cols, top.terms)
        if x is None:
            raise ValueError("symbol is not a polynomial in the q_{a,b}; input not invariant?")
        piece = NOPoly()
        for P, coeff in zip(cands, x):
            if coeff:
                piece = piece + coeff * P
        out = out + piece
        rest = FockState(rest.system, _sub(rest.terms, piece.state(real).terms))
    return out


def _sub(a, b):
    t = dict(a)
    for w, c in b.items():
        v = t.get(w, 0) - c
        if v:
            t[w] = v
        else:
            t.pop(w, None)
    return t


class DijElement:
    def __init__(self, n, I, J, poly, order="lex"):
        self.n, self.I, self.J = n, tuple(I), tuple(J)
        self.poly = poly
        self.order = order
        self._state = None

    @property
    def weight(self):
        return sum(self.I) + sum(self.J) + self.n + 1

    @property
    def decomposition(self):
        return {2 * k: self.poly.part(k) for k in range(1, self.n + 2)}

    def state(self):
        """The element as a state of M_{-n}."""
        if self._state is None:
            self._state = self.poly.state(Realization("abstract", c=-self.n))
        return self._state

    def remainder(self):
        return remainder(self)

    def __repr__(self):
        return f"D_{{{self.I},{self.J}}} = {self.poly!r}"


_DIJ = {}


def construct_dij(n, I, J, order="lex"):
    I, J = check_index_lists(I, J)
    if len(I) != n + 1:
        raise ValueError(f"I and J need n+1 = {n + 1} entries")
    key = (n, I, J, order)
    if key in _DIJ:
        return _DIJ[key]
    lead = canonical_order(det_dij(I, J), order)
    img = lead.state(bg_realization(n))
    corr = express_as_nopoly(img, n, n, order) if img.terms else NOPoly()
    el = DijElement(n, I, J, lead - corr, order)
    _DIJ[key] = el
    return el


def remainder(D):
    """(R, m): coefficient of J^m in the degree-2 part, m = |I|+|J|+n."""
    m = D.weight - 1
    lin = D.poly.part(1).in_j_basis()
    return lin.get((0, m), Fraction(0)), m


# ---------------------------------------------------------------- parabolic action

def lam_coeff(a, b, w, l):
    if l + w - a < 0:
        return Fraction(0)
    return Fraction((-1) ** (b + 1) * factorial(b + l), factorial(l + w - a))


def mu_coeff(a, b, w, m):
    if m + w - b < 0:
        return Fraction(0)
    return Fraction((-1) ** a * factorial(a + m), factorial(m + w - b))


def parabolic_act(a, b, w, v, c=None):
    """Omega_{a,b} o_{a+b-w} applied to a state of M_c."""
    k = a + b - w
    if k < 0 or a < 0 or b < 0:
        raise ValueError(f"invalid circle index a+b-w = {k}")
    sysm = v.system
    real = Realization.for_system(sysm)
    return circle(sysm, build_omega(a, b, real), k, v)


def parabolic_expected(a, b, w, l, m, c):
    """lambda Omega_{l+w,m} + mu Omega_{l,m+w} as a state of M_c."""
    real = Realization("abstract", c=c)
    out = FockState(real.system)
    la, mu = lam_coeff(a, b, w, l), mu_coeff(a, b, w, m)
    if la:
        out = out + la * state_of(real.system, build_omega(l + w, m, real))
    if mu:
        out = out + mu * state_of(real.system, build_omega(l, m + w, real))
    return out


def permuted_index(L, r, w):
    """Apply L[r] += w; return (sign, sorted list) or (0, None) on a repeat."""
    new = list(L)
    new[r] += w
    if new[r] < 0 or len(set(new)) < len(new):
        return 0, None
    perm = sorted(range(len(new)), key=lambda i: new[i])
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cyc = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cyc += 1
        if cyc % 2 == 0:
            sign = -sign
    return sign, tuple(sorted(new))


def parabolic_on_dij(a, b, w, I, J):
    """Predicted p(D_{I,J}) as {(I', J'): coeff} from the weighted-derivation rule."""
    out = {}
    for r in range(len(I)):
        s, newI = permuted_index(I, r, w)
        la = lam_coeff(a, b, w, I[r])
        if s and la:
            out[(newI, tuple(J))] = out.get((newI, tuple(J)), 0) + s * la
        s, newJ = permuted_index(J, r, w)
        mu = mu_coeff(a, b, w, J[r])
        if s and mu:
            out[(tuple(I), newJ)] = out.get((tuple(I), newJ), 0) + s * mu
    return {k: v for k, v in out.items() if v}


def j2_eigenvalue(I, J):
    return -sum(i * (i - 1) for i in I) + sum((j + 1) * (j + 2) for j in J)


# ---------------------------------------------------------------- relations

def ecirc(a, k, c, sysm):
    """a o_k c for k >= 0 as a field expression over J^l, without reordering."""
    memo = sysm._fmemo.setdefault("ecirc", {})
    key = (a, k, c)
    hit = memo.get(key)
    if hit is None:
        hit = _ecirc(a, k, c, sysm)
        memo[key] = hit
    return hit


def _emode(x, p, y, sysm):
    if p >= 0:
        return ecirc(x, p, y, sysm)
    q = -p - 1
    return mk_wick(Lin([(Fraction(1, factorial(q)), mk_deriv(q, x))]) if q else x, y)


def _ecirc(a, k, c, sysm):
    if isinstance(a, Lin):
        return Lin.of([(x, ecirc(t, k, c, sysm)) for x, t in a.terms])
    if isinstance(c, Lin):
        return Lin.of([(x, ecirc(a, k, t, sysm)) for x, t in c.terms])
    if isinstance(a, Vac) or isinstance(c, Vac):
        return ZERO
    if isinstance(a, Deriv):
        # (d^j x) o_k = (-1)^j (k)_j x o_{k-j}
        f = falling(k, a.k)
        if not f:
            return ZERO
        return Lin.of([((-1) ** a.k * f, ecirc(a.e, k - a.k, c, sysm))])
    if isinstance(a, Wick):
        # (:xy:)(k) = sum_{j<=-1} x(j) y(k-j-1) + sum_{j>=0} y(k-j-1) x(j)
        wx, wy, wc = (_expr_weight(sysm, t) for t in (a.a, a.b, c))
        pairs = []
        for j in range(-1, k - wy - wc - 1, -1):
            inner = ecirc(a.b, k - j - 1, c, sysm)
            if not is_zero_expr(inner):
                pairs.append((1, _emode(a.a, j, inner, sysm)))
        for j in range(0, wx + wc):
            inner = ecirc(a.a, j, c, sysm)
            if not is_zero_expr(inner):
                pairs.append((1, _emode(a.b, k - j - 1, inner, sysm)))
        return Lin.of(pairs)
    if isinstance(c, Deriv):
        # x o_k (d y) = d (x o_k y) + k x o_{k-1} y
        y = mk_deriv(c.k - 1, c.e)
        pairs = [(1, mk_deriv(1, ecirc(a, k, y, sysm)))]
        if k:
            pairs.append((k, ecirc(a, k - 1, y, sysm)))
        return Lin.of(pairs)
    if isinstance(c, Wick):
        b, d = c.a, c.b
        pairs = [(1, mk_wick(ecirc(a, k, b, sysm), d)), (1, mk_wick(b, ecirc(a, k, d, sysm)))]
        for i in range(1, k + 1):
            inner = ecirc(a, k - i, b, sysm)
            if not is_zero_expr(inner):
                pairs.append((comb(k, i), ecirc(inner, i - 1, d, sysm)))
        return Lin.of(pairs)
    if isinstance(a, Gen) and isinstance(c, Gen):
        st = circle(sysm, a, k, c)
        return Lin.of([(x, word_expr(sysm, w)) for w, x in st.terms.items()])
    raise TypeError(f"ecirc on {a!r}, {c!r}")


class Relation:
    """j^r = P with P a normally ordered expression in lower j's.

    `expr` lives over the generators J^l of M_c; `target` is "betagamma" for
    W_{1+inf,-n} and "bc" for W_{1+inf,n}.
    """

    def __init__(self, n, r, expr, target="betagamma", poly=None):
        self.n, self.r, self.expr = n, r, expr
        self.target = target
        self.poly = poly

    def generators(self):
        return sorted(i for name, i in gens_in(self.expr) if name == "J")

    def residual(self):
        real = Realization(self.target, n=self.n)
        lhs = state_of(real.system, build_j(self.r, real))
        return lhs - pi_project(self.expr, self.n, self.target)

    def verify(self):
        return self.residual().is_zero()

    def __repr__(self):
        if self.poly is not None:
            return f"j^{self.r} = {self.poly!r}"
        from .sexpr import from_expr, to_text
        return f"j^{self.r} = {to_text(from_expr(self.expr))}"


def decoupling_from(D, n, target="betagamma"):
    """j^l = -(1/lambda)(d omega + sum_{k>=2} D^{2k}) from a decomposition of D."""
    lin = D.poly.part(1).in_j_basis()
    m = D.weight - 1
    lam = lin.get((0, m), Fraction(0))
    if not lam:
        raise ArithmeticError(f"remainder vanishes for n={n}; no decoupling relation")
    dpart = NOPoly({(("J", l, i),): c for (i, l), c in lin.items() if i > 0})
    higher = NOPoly()
    for k in range(2, D.poly.degree() + 1):
        higher = higher + D.poly.part(k)
    if D.poly.part(0).terms:
        raise ArithmeticError("unexpected scalar part")
    P = (-1 / lam) * (dpart + higher)
    expr = P.to_expr(Realization("abstract", c=-n if target == "betagamma" else n))
    return Relation(n, m, expr, target, poly=P)


_DEC = {}


def decoupling(n):
    if n not in _DEC:
        D0 = construct_dij(n, tuple(range(n + 1)), tuple(range(n + 1)))
        _DEC[n] = decoupling_from(D0, n)
    return _DEC[n]


def raise_decoupling(n, rel, base=None):
    """From j^{r-1} = P derive j^r by applying Omega_{0,2} o_1."""
    base = base or decoupling(n)
    l = base.r
    if rel.r < l:
        raise ValueError("relation index below n^2+2n")
    r = rel.r + 1
    c = -n if rel.target == "betagamma" else n
    real = Realization("abstract", c=c)
    sysm = real.system
    x = build_omega(0, 2, real)
    new = Lin.of([(Fraction(-1, r + 1), ecirc(x, 1, rel.expr, sysm))])
    new = substitute(new, lambda g: base.expr if g.name == "J" and g.index >= l else None)
    out = Relation(n, r, new, rel.target)
    if any(i >= l for i in out.generators()):
        raise ArithmeticError("elimination left generators of index >= n^2+2n")
    if not out.verify():
        raise ArithmeticError(f"raised relation for j^{r} failed verification")
    return out


# ---------------------------------------------------------------- bc (positive central charge)

def bc_decoupling(n):
    """Singular vector of weight n+1 in M_n and the relation j^n = P(j^0..j^{n-1}) in bc."""
    sv = find_singular(w=n + 1, c=n)
    if len(sv) != 1:
        raise ArithmeticError(f"expected one singular vector, found {len(sv)}")
    D = sv[0]
    sysm = D.system
    lam = D.coeff(((n, -1),))
    if not lam:
        raise ArithmeticError("J^n does not appear linearly")
    rest = FockState(sysm, {w: c for w, c in D.terms.items() if w != ((n, -1),)})
    expr = Lin.of([(-c / lam, word_expr(sysm, w)) for w, c in rest.terms.items()])
    return D, Relation(n, n, expr, "bc")


# ---------------------------------------------------------------- L and W

def build_LW(n):
    real = bg_realization(n)
    j0, j1, j2 = (build_j(l, real) for l in range(3))
    L = Lin.of([(Fraction(1, 2 * n), Wick(j0, j0)), (Fraction(1, 2), Deriv(1, j0)), (-1, j1)])
    W = Lin.of([
        (1, wick(j0, j0, j0)),
        (Fraction(3 * n, 2), Wick(j0, Deriv(1, j0))),
        (-3 * n, Wick(j0, j1)),
        (Fraction(n * n, 4), Deriv(2, j0)),
        (Fraction(-3 * n * n, 2), Deriv(1, j1)),
        (Fraction(3 * n * n, 2), j2),
    ])
    return L, W


def lw_report(n, kmax=4):
    real = bg_realization(n)
    sysm = real.system
    L, W = build_LW(n)
    j0 = build_j(0, real)
    vac = FockState.vacuum(sysm)
    sL = state_of(sysm, L)
    sW = state_of(sysm, W)
    checks = {}
    checks["L3L"] = circle(sysm, L, 3, L) == Fraction(-n - 1, 2) * vac
    checks["L2L"] = circle(sysm, L, 2, L).is_zero()
    checks["L1L"] = circle(sysm, L, 1, L) == 2 * sL
    checks["L0L"] = circle(sysm, L, 0, L) == state_of(sysm, Deriv(1, L))
    for k in range(4, 8):
        checks[f"L{k}L"] = circle(sysm, L, k, L).is_zero()
    checks["L1W"] = circle(sysm, L, 1, W) == 3 * sW
    checks["L0W"] = circle(sysm, L, 0, W) == state_of(sysm, Deriv(1, W))
    for k in range(2, 7):
        checks[f"L{k}W"] = circle(sysm, L, k, W).is_zero()
    for k in range(0, kmax + 1):
        checks[f"L{k}j0"] = circle(sysm, L, k, j0).is_zero()
        checks[f"W{k}j0"] = circle(sysm, W, k, j0).is_zero()
    failed = [k for k, v in checks.items() if not v]
    return {"n": n, "central_charge": str(-n - 1), "checks": checks, "failed": failed,
            "ok": not failed}


def l_monomials(weight):
    """Right-nested monomials in d^i L with the given total weight."""
    out = []

    def rec(left, start, cur):
        if left == 0:
            out.append(tuple(cur))
            return
        for i in range(start, left - 1):
            if 2 + i <= left:
                cur.append(i)
                rec(left - 2 - i, i, cur)
                cur.pop()

    rec(weight, 0, [])
    return out


def w3_closure(n=1):
    """Express W o_k W (k = 0..5) through normally ordered polynomials in d^i L."""
    real = bg_realization(n)
    sysm = real.system
    L, W = build_LW(n)
    res = {}
    for k in range(0, 6):
        target = circle(sysm, W, k, W)
        wt = 5 - k
        mons = l_monomials(wt)
        cols = [state_of(sysm, wick(*[mk_deriv(i, L) for i in mo])).terms for mo in mons]
        x = linalg.solve(cols, target.terms) if mons else (None if target.terms else [])
        if x is None:
            res[k] = None
        else:
            res[k] = {mo: c for mo, c in zip(mons, x) if c}
    return res
