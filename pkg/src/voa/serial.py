"""JSON wire formats. Coefficients are always "p/q" strings."""
from __future__ import annotations

import json
from fractions import Fraction

from .fock import BetaGammaSystem, CurrentSystem, FockState, _word_order, get_system
from .poly import poly_from_json, poly_to_json  # noqa: F401  (re-exported wire format)


def q(x):
    return str(Fraction(x))


def system_to_json(system):
    if isinstance(system, CurrentSystem):
        return {"kind": "current", "c": q(system.c)}
    kind = "betagamma" if isinstance(system, BetaGammaSystem) else "bc"
    return {"kind": kind, "n": system.n}


def system_from_json(d):
    if d["kind"] == "current":
        return get_system("current", Fraction(d["c"]))
    return get_system(d["kind"], int(d["n"]))


def state_to_json(v):
    ws = v.weights()
    terms = []
    for w in sorted(v.terms, key=_word_order):
        word = []
        for g, m in w:
            name, i = v.system.gen_label(g)
            word.append([name, i, m])
        terms.append({"coeff": q(v.terms[w]), "word": word})
    return {"system": system_to_json(v.system), "weight": ws[0] if len(ws) == 1 else None,
            "terms": terms}


def state_from_json(d):
    system = system_from_json(d["system"])
    terms = {}
    for t in d["terms"]:
        w = tuple((system.gen_id(name, i), m) for name, i, m in t["word"])
        terms[w] = Fraction(t["coeff"])
    return FockState(system, terms)


def nopoly_to_json(P):
    out = []
    for m in sorted(P.terms, key=lambda m: (-len(m), m)):
        out.append({"coeff": q(P.terms[m]), "factors": [list(f) for f in m]})
    return out


def nopoly_from_json(data):
    from .w1inf import NOPoly
    return NOPoly({tuple(tuple(f) for f in t["factors"]): Fraction(t["coeff"]) for t in data})


def dumps(obj):
    """Canonical JSON text."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)

