"""A small S-expression language for fields.

    (J l)            J^l (j^l in a free-field system)
    (Om a b)         Omega_{a,b}
    (beta i) (gamma i) (b i) (c i)   free-field generators
    (d k e)          k-th derivative
    (w e1 e2 ...)    right-nested Wick product
    (circ n e1 e2)   e1 o_n e2
    (+ e1 e2 ...)    sum
    (* "p/q" e)      scalar multiple
    (vac)            the vacuum
"""
from __future__ import annotations

import re
from fractions import Fraction

from .fock import (
    BCSystem, BetaGammaSystem, Circ, CurrentSystem, Deriv, Gen, Lin, VAC, Vac, Wick, wick,
)

_TOKEN = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|([^\s()"]+))')


class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _tokens(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1):
            out.append(("(", None, start))
        elif m.group(2):
            out.append((")", None, start))
        elif m.group(3) is not None:
            out.append(("str", m.group(3), start))
        else:
            out.append(("atom", m.group(4), start))
        pos = m.end()
    return out


def _read(toks, i, text):
    if i >= len(toks):
        raise ParseError("unexpected end of input", len(text))
    kind, val, pos = toks[i]
    if kind == ")":
        raise ParseError("unexpected ')'", pos)
    if kind != "(":
        return (val if kind == "atom" else ("str", val), pos), i + 1
    items = []
    i += 1
    while True:
        if i >= len(toks):
            raise ParseError("missing ')'", len(text))
        if toks[i][0] == ")":
            return (items, pos), i + 1
        item, i = _read(toks, i, text)
        items.append(item)


def _int(node, what):
    val, pos = node
    if isinstance(val, str):
        try:
            return int(val)
        except ValueError:
            pass
    raise ParseError(f"expected integer {what}", pos)


def _scalar(node):
    val, pos = node
    s = val[1] if isinstance(val, tuple) else val
    if isinstance(s, str):
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError("expected rational 'p/q'", pos)


_ARITY = {"J": 1, "Om": 2, "beta": 1, "gamma": 1, "b": 1, "c": 1, "d": 2, "circ": 3, "*": 2, "vac": 0}


def _build(node):
    val, pos = node
    if not isinstance(val, list):
        raise ParseError("expected '(' form", pos)
    if not val:
        raise ParseError("empty form", pos)
    head, hpos = val[0]
    if not isinstance(head, str):
        raise ParseError("form head must be a name", hpos)
    args = val[1:]
    if head in _ARITY and len(args) != _ARITY[head]:
        raise ParseError(f"{head} takes {_ARITY[head]} argument(s), got {len(args)}", pos)
    if head == "J":
        return ("J", _nonneg(args[0], "index"))
    if head == "Om":
        return ("Om", _nonneg(args[0], "index"), _nonneg(args[1], "index"))
    if head in ("beta", "gamma", "b", "c"):
        return ("gen", head, _nonneg(args[0], "index"))
    if head == "d":
        return ("d", _nonneg(args[0], "order"), _build(args[1]))
    if head == "circ":
        return ("circ", _int(args[0], "index"), _build(args[1]), _build(args[2]))
    if head == "w":
        if not args:
            raise ParseError("w needs at least one argument", pos)
        return ("w",) + tuple(_build(x) for x in args)
    if head == "+":
        if not args:
            raise ParseError("+ needs at least one argument", pos)
        return ("+",) + tuple(_build(x) for x in args)
    if head == "*":
        return ("*", _scalar(args[0]), _build(args[1]))
    if head == "vac":
        return ("vac",)
    raise ParseError(f"unknown form {head!r}", hpos)


def _nonneg(node, what):
    k = _int(node, what)
    if k < 0:
        raise ParseError(f"{what} must be nonnegative", node[1])
    return k


def parse(text):
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty expression", 0)
    node, i = _read(toks, 0, text)
    if i != len(toks):
        raise ParseError("trailing input", toks[i][2])
    return _build(node)


def to_text(ast):
    tag = ast[0]
    if tag == "J":
        return f"(J {ast[1]})"
    if tag == "Om":
        return f"(Om {ast[1]} {ast[2]})"
    if tag == "gen":
        return f"({ast[1]} {ast[2]})"
    if tag == "d":
        return f"(d {ast[1]} {to_text(ast[2])})"
    if tag == "circ":
        return f"(circ {ast[1]} {to_text(ast[2])} {to_text(ast[3])})"
    if tag in ("w", "+"):
        return f"({tag} " + " ".join(to_text(x) for x in ast[1:]) + ")"
    if tag == "*":
        return f'(* "{ast[1]}" {to_text(ast[2])})'
    if tag == "vac":
        return "(vac)"
    raise ValueError(tag)


_FAMILY = {"beta": BetaGammaSystem, "gamma": BetaGammaSystem, "b": BCSystem, "c": BCSystem}


def elaborate(ast, system):
    """Turn a parsed form into an engine expression over `system`."""
    from .w1inf import Realization, build_j, build_omega

    tag = ast[0]
    if tag == "J":
        if isinstance(system, CurrentSystem):
            return Gen("J", ast[1])
        return build_j(ast[1], Realization.for_system(system))
    if tag == "Om":
        return build_omega(ast[1], ast[2], Realization.for_system(system))
    if tag == "gen":
        if not isinstance(system, _FAMILY[ast[1]]) or ast[2] >= system.n:
            raise ValueError(f"generator ({ast[1]} {ast[2]}) is not in {system}")
        return Gen(ast[1], ast[2])
    if tag == "d":
        return Deriv(ast[1], elaborate(ast[2], system)) if ast[1] else elaborate(ast[2], system)
    if tag == "circ":
        return Circ(ast[1], elaborate(ast[2], system), elaborate(ast[3], system))
    if tag == "w":
        return wick(*[elaborate(x, system) for x in ast[1:]])
    if tag == "+":
        return Lin.of([(1, elaborate(x, system)) for x in ast[1:]])
    if tag == "*":
        return Lin.of([(ast[1], elaborate(ast[2], system))])
    if tag == "vac":
        return VAC
    raise ValueError(tag)


def from_expr(e):
    """Engine expression (generators J^l or free fields) back to a form."""
    if isinstance(e, Gen):
        return ("J", e.index) if e.name == "J" else ("gen", e.name, e.index)
    if isinstance(e, Vac):
        return ("vac",)
    if isinstance(e, Deriv):
        return ("d", e.k, from_expr(e.e))
    if isinstance(e, Wick):
        parts = [from_expr(e.a)]
        rest = e.b
        while isinstance(rest, Wick):
            parts.append(from_expr(rest.a))
            rest = rest.b
        parts.append(from_expr(rest))
        return ("w",) + tuple(parts)
    if isinstance(e, Lin):
        items = []
        for c, t in e.terms:
            items.append(from_expr(t) if c == 1 else ("*", Fraction(c), from_expr(t)))
        if len(items) == 1:
            return items[0]
        if not items:
            return ("*", Fraction(0), ("vac",))
        return ("+",) + tuple(items)
    if isinstance(e, Circ):
        return ("circ", e.n, from_expr(e.a), from_expr(e.b))
    raise TypeError(f"no text form for {e!r}")
