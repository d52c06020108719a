"""Mode-level Fock computations for the current system M_c, the beta-gamma
system and the bc system.

Conventions: a(z) = sum a(m) z^{-m-1}; a(m) lowers weight by m + 1 - wt(a);
a(m)|0> = 0 for m >= 0.  A state is a dict {word: Fraction} where a word is a
tuple of creation modes (gen, m), m <= -1, sorted by (gen, -m).
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import comb, factorial

from .diffop import DiffOp, bracket_central, falling

_ZERO = Fraction(0)


def _key(mode):
    return (mode[0], -mode[1])


def _addto(acc, state, scale=1):
    for w, c in state.items():
        v = acc.get(w, _ZERO) + c * scale
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)
    return acc


class SystemError_(ValueError):
    pass


class GeneratorSystem:
    """Base class.  Subclasses fill in apply_gen for a single generator mode."""

    kind = ""

    def __init__(self):
        self._memo = {}
        self._fmemo = {}

    # generators are addressed by (name, index) in expressions and by an int here
    def gen_id(self, name, i):
        raise NotImplementedError

    def gen_label(self, g):
        raise NotImplementedError

    def gen_weight(self, g):
        raise NotImplementedError

    def gen_odd(self, g):
        return False

    def mode_weight(self, mode):
        return self.gen_weight(mode[0]) - mode[1] - 1

    def word_weight(self, word):
        return sum(self.mode_weight(x) for x in word)

    def word_parity(self, word):
        return sum(1 for x in word if self.gen_odd(x[0])) % 2

    def apply_gen(self, g, m, word):
        key = (g, m, word)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._apply_gen(g, m, word)
            self._memo[key] = hit
        return hit

    def descriptor(self):
        raise NotImplementedError

    def __repr__(self):
        d = self.descriptor()
        return f"{d['kind']}:{d.get('n', d.get('c'))}"


class CurrentSystem(GeneratorSystem):
    """Vacuum module M_c: generators J^l (weight l+1), mode J^l(k) acting as t^k d^l."""

    kind = "current"

    def __init__(self, c):
        super().__init__()
        self.c = Fraction(c)
        self._brk = {}

    def gen_id(self, name, i):
        if name != "J":
            raise SystemError_(f"generator {name} not in {self}")
        return int(i)

    def gen_label(self, g):
        return ("J", g)

    def gen_weight(self, g):
        return g + 1

    def descriptor(self):
        return {"kind": "current", "c": str(self.c)}

    def bracket(self, x, y):
        """[J^a(p), J^b(q)] as ([(mode, coeff)], central scalar)."""
        key = (x, y)
        hit = self._brk.get(key)
        if hit is None:
            f = DiffOp.mono(x[1], x[0])
            g = DiffOp.mono(y[1], y[0])
            op, z = bracket_central(f, g, self.c)
            hit = ([((l, a), c) for (a, l), c in op.terms.items()], z)
            self._brk[key] = hit
        return hit

    def _apply_gen(self, g, m, word):
        if not word:
            return {} if m >= 0 else {((g, m),): Fraction(1)}
        x = word[0]
        if m < 0 and _key((g, m)) <= _key(x):
            return {((g, m),) + word: Fraction(1)}
        rest = word[1:]
        out = {}
        # y x rest = x (y rest) + [y, x] rest
        for w, c in self.apply_gen(g, m, rest).items():
            _addto(out, self.apply_gen(x[0], x[1], w), c)
        modes, z = self.bracket((g, m), x)
        for (l, k), c in modes:
            _addto(out, self.apply_gen(l, k, rest), c)
        if z:
            _addto(out, {rest: z})
        return out


class BetaGammaSystem(GeneratorSystem):
    """Rank-n beta-gamma system: beta^i weight 1, gamma^i weight 0, all even."""

    kind = "betagamma"

    def __init__(self, n):
        super().__init__()
        self.n = int(n)

    def gen_id(self, name, i):
        i = int(i)
        if not 0 <= i < self.n:
            raise SystemError_(f"index {i} out of range for {self}")
        if name == "beta":
            return i
        if name == "gamma":
            return self.n + i
        raise SystemError_(f"generator {name} not in {self}")

    def gen_label(self, g):
        return ("beta", g) if g < self.n else ("gamma", g - self.n)

    def gen_weight(self, g):
        return 1 if g < self.n else 0

    def descriptor(self):
        return {"kind": "betagamma", "n": self.n}

    def _partner(self, g):
        return g + self.n if g < self.n else g - self.n

    def _apply_gen(self, g, m, word):
        if m < 0:
            new = tuple(sorted(word + ((g, m),), key=_key))
            return {new: Fraction(1)}
        # [beta(m), gamma(-m-1)] = 1 and [gamma(m), beta(-m-1)] = -1
        target = (self._partner(g), -m - 1)
        cnt = word.count(target)
        if not cnt:
            return {}
        i = word.index(target)
        sign = 1 if g < self.n else -1
        return {word[:i] + word[i + 1:]: Fraction(sign * cnt)}


class BCSystem(GeneratorSystem):
    """Rank-n bc system: odd b^i of weight 1 and c^i of weight 0."""

    kind = "bc"

    def __init__(self, n):
        super().__init__()
        self.n = int(n)

    def gen_id(self, name, i):
        i = int(i)
        if not 0 <= i < self.n:
            raise SystemError_(f"index {i} out of range for {self}")
        if name == "b":
            return i
        if name == "c":
            return self.n + i
        raise SystemError_(f"generator {name} not in {self}")

    def gen_label(self, g):
        return ("b", g) if g < self.n else ("c", g - self.n)

    def gen_weight(self, g):
        return 1 if g < self.n else 0

    def gen_odd(self, g):
        return True

    def descriptor(self):
        return {"kind": "bc", "n": self.n}

    def _apply_gen(self, g, m, word):
        if m < 0:
            mode = (g, m)
            if mode in word:
                return {}
            k = _key(mode)
            pos = 0
            while pos < len(word) and _key(word[pos]) < k:
                pos += 1
            sign = -1 if pos % 2 else 1
            return {word[:pos] + (mode,) + word[pos:]: Fraction(sign)}
        partner = g + self.n if g < self.n else g - self.n
        target = (partner, -m - 1)
        if target not in word:
            return {}
        pos = word.index(target)
        sign = -1 if pos % 2 else 1
        return {word[:pos] + word[pos + 1:]: Fraction(sign)}


_SYSTEMS = {}


def get_system(kind, param):
    """Shared system instances, so mode caches are reused."""
    if kind == "current":
        key = (kind, Fraction(param))
    else:
        key = (kind, int(param))
    sysm = _SYSTEMS.get(key)
    if sysm is None:
        cls = {"current": CurrentSystem, "betagamma": BetaGammaSystem, "bc": BCSystem}.get(kind)
        if cls is None:
            raise SystemError_(f"unknown system kind {kind!r}")
        if kind != "current" and int(param) < 1:
            raise SystemError_("rank must be positive")
        sysm = cls(param)
        _SYSTEMS[key] = sysm
    return sysm


def parse_system(text):
    """'current:-1', 'betagamma:2', 'bc:1'."""
    kind, _, param = text.partition(":")
    if not param:
        raise SystemError_(f"system spec {text!r} needs a parameter")
    return get_system(kind, Fraction(param) if kind == "current" else int(param))


# ---------------------------------------------------------------- field expressions

class Expr:
    __slots__ = ("_h",)
    tag = ""

    def _args(self):
        raise NotImplementedError

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((self.tag,) + self._args())
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other):
        return type(self) is type(other) and hash(self) == hash(other) and self._args() == other._args()

    def __add__(self, other):
        return Lin.of([(1, self), (1, other)])

    def __sub__(self, other):
        return Lin.of([(1, self), (-1, other)])

    def __neg__(self):
        return Lin.of([(-1, self)])

    def __rmul__(self, s):
        return Lin.of([(s, self)])

    def d(self, k=1):
        return Deriv(k, self) if k else self


class Vac(Expr):
    __slots__ = ()
    tag = "vac"

    def __init__(self):
        self._h = None

    def _args(self):
        return ()

    def __repr__(self):
        return "1"


class Gen(Expr):
    __slots__ = ("name", "index")
    tag = "gen"

    def __init__(self, name, index=0):
        self.name = name
        self.index = int(index)
        self._h = None

    def _args(self):
        return (self.name, self.index)

    def __repr__(self):
        if self.name == "J":
            return f"J^{self.index}"
        return f"{self.name}^{self.index}"


class Deriv(Expr):
    __slots__ = ("k", "e")
    tag = "d"

    def __init__(self, k, e):
        if isinstance(e, Deriv):
            k, e = k + e.k, e.e
        self.k = int(k)
        self.e = e
        self._h = None

    def _args(self):
        return (self.k, self.e)

    def __repr__(self):
        return f"d^{self.k}({self.e!r})" if self.k > 1 else f"d({self.e!r})"


class Wick(Expr):
    __slots__ = ("a", "b")
    tag = "wick"

    def __init__(self, a, b):
        self.a = a
        self.b = b
        self._h = None

    def _args(self):
        return (self.a, self.b)

    def __repr__(self):
        return f":{self.a!r} {self.b!r}:"


class Lin(Expr):
    __slots__ = ("terms",)
    tag = "lin"

    def __init__(self, terms):
        self.terms = tuple(terms)
        self._h = None

    @classmethod
    def of(cls, pairs):
        acc = {}
        order = []
        for c, e in pairs:
            if isinstance(e, Lin):
                for c2, e2 in e.terms:
                    if e2 not in acc:
                        order.append(e2)
                    acc[e2] = acc.get(e2, 0) + Fraction(c) * c2
            else:
                if e not in acc:
                    order.append(e)
                acc[e] = acc.get(e, 0) + Fraction(c)
        return cls([(acc[e], e) for e in order if acc[e]])

    def _args(self):
        return self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{e!r}" for c, e in self.terms)


class Circ(Expr):
    __slots__ = ("n", "a", "b")
    tag = "circ"

    def __init__(self, n, a, b):
        self.n = int(n)
        self.a = a
        self.b = b
        self._h = None

    def _args(self):
        return (self.n, self.a, self.b)

    def __repr__(self):
        return f"({self.a!r} o_{self.n} {self.b!r})"


class StateField(Expr):
    """The field attached to a FockState (via its PBW words)."""

    __slots__ = ("key",)
    tag = "state"

    def __init__(self, terms):
        self.key = tuple(sorted(terms.items()))
        self._h = None

    def _args(self):
        return self.key

    def __repr__(self):
        return f"<state {len(self.key)} terms>"


VAC = Vac()


def wick(*args):
    """Right-nested iterated Wick product :a1 a2 ... ak:."""
    if not args:
        return VAC
    return reduce(lambda acc, a: Wick(a, acc), reversed(args[:-1]), args[-1])


def J(l):
    return Gen("J", l)


# ---------------------------------------------------------------- states

class FockState:
    __slots__ = ("system", "terms")

    def __init__(self, system, terms=None):
        self.system = system
        self.terms = {w: Fraction(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def vacuum(cls, system):
        return cls(system, {(): 1})

    def _check(self, other):
        if other.system is not self.system:
            raise SystemError_(f"mixed systems {self.system} and {other.system}")

    def __add__(self, other):
        self._check(other)
        return FockState(self.system, _addto(dict(self.terms), other.terms))

    def __sub__(self, other):
        self._check(other)
        return FockState(self.system, _addto(dict(self.terms), other.terms, -1))

    def __neg__(self):
        return FockState(self.system, {w: -c for w, c in self.terms.items()})

    def __rmul__(self, s):
        s = Fraction(s)
        return FockState(self.system, {w: s * c for w, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FockState) and other.system is self.system and other.terms == self.terms

    def __hash__(self):
        return hash((id(self.system), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def weights(self):
        return sorted({self.system.word_weight(w) for w in self.terms})

    @property
    def weight(self):
        ws = self.weights()
        if len(ws) > 1:
            raise ValueError(f"inhomogeneous state (weights {ws})")
        return ws[0] if ws else None

    @property
    def degree(self):
        """Number of generator modes in the longest word."""
        return max((len(w) for w in self.terms), default=-1)

    def part(self, deg):
        return FockState(self.system, {w: c for w, c in self.terms.items() if len(w) == deg})

    def coeff(self, word):
        return self.terms.get(word, _ZERO)

    def as_field(self):
        return StateField(self.terms)

    def normalized(self):
        """Scale so the canonically first term has coefficient 1."""
        if not self.terms:
            return self
        lead = min(self.terms, key=_word_order)
        return (1 / self.terms[lead]) * self

    def __repr__(self):
        return format_state(self)


def _word_order(word):
    return (-len(word), tuple(_key(x) for x in word))


def format_mode(system, mode):
    name, i = system.gen_label(mode[0])
    if name == "J":
        return f"J^{i}({mode[1]})"
    return f"{name}^{i}({mode[1]})" if getattr(system, "n", 1) > 1 else f"{name}({mode[1]})"


def format_state(v):
    if not v.terms:
        return "0"
    parts = []
    for w in sorted(v.terms, key=_word_order):
        c = v.terms[w]
        body = " ".join(format_mode(v.system, x) for x in w)
        parts.append(f"{c}·{body}|0⟩" if body else f"{c}·|0⟩")
    return " + ".join(parts)


# ---------------------------------------------------------------- the engine

def _expr_weight(system, e):
    """Largest weight of a homogeneous component (used only for truncation)."""
    memo = system._fmemo.setdefault("wt", {})
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Vac):
        w = 0
    elif isinstance(e, Gen):
        w = system.gen_weight(system.gen_id(e.name, e.index))
    elif isinstance(e, Deriv):
        w = _expr_weight(system, e.e) + e.k
    elif isinstance(e, Wick):
        w = _expr_weight(system, e.a) + _expr_weight(system, e.b)
    elif isinstance(e, Lin):
        w = max((_expr_weight(system, t) for _, t in e.terms), default=0)
    elif isinstance(e, Circ):
        w = _expr_weight(system, e.a) + _expr_weight(system, e.b) - e.n - 1
    elif isinstance(e, StateField):
        w = max((system.word_weight(x) for x, _ in e.key), default=0)
    else:
        raise TypeError(e)
    memo[e] = w
    return w


def parity(system, e):
    if isinstance(e, Vac):
        return 0
    if isinstance(e, Gen):
        return int(system.gen_odd(system.gen_id(e.name, e.index)))
    if isinstance(e, Deriv):
        return parity(system, e.e)
    if isinstance(e, Wick):
        return (parity(system, e.a) + parity(system, e.b)) % 2
    if isinstance(e, Circ):
        return (parity(system, e.a) + parity(system, e.b)) % 2
    if isinstance(e, Lin):
        ps = {parity(system, t) for _, t in e.terms}
    elif isinstance(e, StateField):
        ps = {system.word_parity(w) for w, _ in e.key}
    else:
        raise TypeError(e)
    if len(ps) > 1:
        raise ValueError("field of mixed parity")
    return ps.pop() if ps else 0


def _mode_word(system, e, m, word):
    """e(m) applied to a single PBW word; memoized per system."""
    memo = system._fmemo.setdefault("mode", {})
    key = (e, m, word)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = _mode_word_raw(system, e, m, word)
    memo[key] = out
    return out


def _mode_state(system, e, m, state):
    out = {}
    for w, c in state.items():
        _addto(out, _mode_word(system, e, m, w), c)
    return out


def _mode_word_raw(system, e, m, word):
    if isinstance(e, Gen):
        return system.apply_gen(system.gen_id(e.name, e.index), m, word)
    if isinstance(e, Vac):
        return {word: Fraction(1)} if m == -1 else {}
    if isinstance(e, Deriv):
        # (d^k a)(m) = (-1)^k (m)_k a(m-k)
        f = falling(m, e.k)
        if not f:
            return {}
        s = -f if e.k % 2 else f
        return _addto({}, _mode_word(system, e.e, m - e.k, word), s)
    if isinstance(e, Lin):
        out = {}
        for c, t in e.terms:
            _addto(out, _mode_word(system, t, m, word), c)
        return out
    if isinstance(e, Wick):
        return _wick_mode(system, e.a, e.b, m, word)
    if isinstance(e, Circ):
        return _mode_word(system, circle_field(system, e), m, word)
    if isinstance(e, StateField):
        return _mode_word(system, _state_field_expr(system, e), m, word)
    raise TypeError(e)


def _wick_mode(system, a, b, m, word):
    # (:ab:)(m) = sum_{j<=-1} a(j) b(m-j-1) + s sum_{j>=0} b(m-j-1) a(j)
    if isinstance(system, BCSystem):
        # the sign depends on parity, so split sums first
        if isinstance(a, Lin):
            out = {}
            for c, t in a.terms:
                _addto(out, _wick_mode(system, t, b, m, word), c)
            return out
        if isinstance(b, Lin):
            out = {}
            for c, t in b.terms:
                _addto(out, _wick_mode(system, a, t, m, word), c)
            return out
    wv = system.word_weight(word)
    out = {}
    top_b = wv + _expr_weight(system, b) - 1
    for j in range(-1, m - 2 - top_b, -1):
        r = _mode_word(system, b, m - j - 1, word)
        if r:
            _addto(out, _mode_state(system, a, j, r))
    top_a = wv + _expr_weight(system, a) - 1
    if top_a >= 0:
        s = -1 if parity(system, a) and parity(system, b) else 1
        for j in range(0, top_a + 1):
            r = _mode_word(system, a, j, word)
            if r:
                _addto(out, _mode_state(system, b, m - j - 1, r), s)
    return out


def _state_field_expr(system, sf):
    memo = system._fmemo.setdefault("sf", {})
    hit = memo.get(sf)
    if hit is None:
        hit = Lin([(c, word_expr(system, w)) for w, c in sf.key])
        memo[sf] = hit
    return hit


def word_expr(system, word):
    """Right-nested Wick product :X1 ... Xr: with Xi = d^k g / k!, mode g(-k-1)."""
    if not word:
        return VAC
    parts = []
    for g, m in word:
        name, i = system.gen_label(g)
        k = -m - 1
        x = Gen(name, i)
        if k:
            x = Lin([(Fraction(1, factorial(k)), Deriv(k, x))])
        parts.append(x)
    return wick(*parts)


def circle_field(system, e):
    memo = system._fmemo.setdefault("circ", {})
    hit = memo.get(e)
    if hit is None:
        st = _mode_state(system, e.a, e.n, state_dict(system, e.b))
        hit = StateField(st)
        memo[e] = hit
    return hit


def state_dict(system, e):
    return _mode_word(system, e, -1, ())


# ---------------------------------------------------------------- public operations

def state_of(system, e) -> FockState:
    return FockState(system, state_dict(system, e))


def apply_mode(system, e, m, v) -> FockState:
    if isinstance(v, FockState):
        if v.system is not system:
            raise SystemError_(f"mixed systems {system} and {v.system}")
        v = v.terms
    return FockState(system, _mode_state(system, e, m, v))


def circle(system, a, n, b) -> FockState:
    if isinstance(b, FockState):
        return apply_mode(system, a, n, b)
    return FockState(system, _mode_state(system, a, n, state_dict(system, b)))


def as_expr(x):
    return x.as_field() if isinstance(x, FockState) else x


def is_zero(v):
    return not v.terms


def state_equal(u, v):
    return u.system is v.system and u.terms == v.terms


def creation_modes(system, maxw):
    """Creation modes of weight <= maxw, with their weights."""
    out = []
    if isinstance(system, CurrentSystem):
        for l in range(maxw):
            for m in range(-1, l - maxw - 1, -1):
                out.append((l, m))
    else:
        for g in range(2 * system.n):
            wg = system.gen_weight(g)
            for m in range(-1, wg - maxw - 2, -1):
                out.append((g, m))
    out.sort(key=_key)
    return [(x, system.mode_weight(x)) for x in out]


def weight_basis(system, w, degree_bound=None):
    """PBW words of weight w (and at most degree_bound modes)."""
    if w < 0:
        return []
    if isinstance(system, BetaGammaSystem) and degree_bound is None:
        raise ValueError("beta-gamma weight spaces are infinite; pass degree_bound")
    modes = creation_modes(system, w)
    odd = isinstance(system, BCSystem)
    cap = degree_bound if degree_bound is not None else 10 ** 9
    res = []

    def rec(start, left, cur):
        if left == 0:
            res.append(tuple(cur))
        if len(cur) >= cap:
            return
        for i in range(start, len(modes)):
            mode, mw = modes[i]
            if mw > left:
                continue
            cur.append(mode)
            rec(i + 1 if odd else i, left - mw, cur)
            cur.pop()

    rec(0, w, [])
    return sorted(set(res), key=_word_order)


def basis_states(system, w, degree_bound=None):
    return [FockState(system, {word: 1}) for word in weight_basis(system, w, degree_bound)]


# ---------------------------------------------------------------- the identity suite

def _circle_expr(system, a, k, b):
    return FockState(system, _mode_state(system, a, k, state_dict(system, b))).as_field()


def identity_suite(system, a, b, c, n=1):
    """Check the three nonassociativity / noncommutativity / derivation identities.

    Returns a dict {"i": bool, "ii": bool, "iii": bool, "witness": ...}.
    """
    pa, pb = parity(system, a), parity(system, b)
    s = -1 if pa and pb else 1
    wa, wb, wc = (_expr_weight(system, x) for x in (a, b, c))
    report = {}

    # (i)
    lhs = state_of(system, Wick(Wick(a, b), c)) - state_of(system, Wick(a, Wick(b, c)))
    rhs = FockState(system)
    for k in range(0, max(wa, wb) + wc + 1):
        bc_ = _circle_expr(system, b, k, c)
        ac_ = _circle_expr(system, a, k, c)
        f = Fraction(1, factorial(k + 1))
        rhs = rhs + f * state_of(system, Wick(Deriv(k + 1, a), bc_))
        rhs = rhs + (s * f) * state_of(system, Wick(Deriv(k + 1, b), ac_))
    report["i"] = lhs == rhs
    if not report["i"]:
        report.setdefault("witness", {"identity": "i", "lhs": lhs, "rhs": rhs})

    # (ii)
    lhs = state_of(system, Wick(a, b)) - s * state_of(system, Wick(b, a))
    rhs = FockState(system)
    for k in range(0, wa + wb + 1):
        ab_ = _circle_expr(system, a, k, b)
        rhs = rhs + Fraction((-1) ** k, factorial(k + 1)) * state_of(system, Deriv(k + 1, ab_))
    report["ii"] = lhs == rhs
    if not report["ii"]:
        report.setdefault("witness", {"identity": "ii", "lhs": lhs, "rhs": rhs})

    # (iii)
    lhs = (circle(system, a, n, Wick(b, c))
           - state_of(system, Wick(_circle_expr(system, a, n, b), c))
           - s * state_of(system, Wick(b, _circle_expr(system, a, n, c))))
    rhs = FockState(system)
    for k in range(1, n + 1):
        inner = _circle_expr(system, a, n - k, b)
        rhs = rhs + comb(n, k) * circle(system, inner, k - 1, c)
    report["iii"] = lhs == rhs
    if not report["iii"]:
        report.setdefault("witness", {"identity": "iii", "lhs": lhs, "rhs": rhs})
    report["ok"] = report["i"] and report["ii"] and report["iii"]
    return report
