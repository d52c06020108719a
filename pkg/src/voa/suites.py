"""Seeded randomized verification suites (behind `voa verify`)."""
from __future__ import annotations

from itertools import combinations

from .fock import get_system, identity_suite
from .invariant import classical_subst, det_dij
from .randgen import random_triple, rng_for
from .serial import state_to_json


def _identities(rng, cases):
    systems = [get_system("current", -1), get_system("betagamma", 1),
               get_system("betagamma", 2), get_system("bc", 1)]
    fails = []
    for i in range(cases):
        sysm = systems[i % len(systems)]
        a, b, c = random_triple(sysm, rng)
        k = rng.randint(0, 3)
        rep = identity_suite(sysm, a, b, c, n=k)
        if not rep["ok"]:
            w = rep["witness"]
            fails.append({"system": str(sysm), "a": repr(a), "b": repr(b), "c": repr(c), "n": k,
                          "identity": w["identity"], "lhs": state_to_json(w["lhs"]),
                          "rhs": state_to_json(w["rhs"])})
    return fails


def _parabolic(rng, cases):
    from .w1inf import Realization, build_omega, parabolic_act, parabolic_expected
    from .fock import state_of

    fails = []
    c = -1
    real = Realization("abstract", c=c)
    for _ in range(cases):
        a, b, l, m = (rng.randint(0, 4) for _ in range(4))
        w = rng.randint(-4, min(4, a + b))
        v = state_of(real.system, build_omega(l, m, real))
        got = parabolic_act(a, b, w, v).part(1)
        exp = parabolic_expected(a, b, w, l, m, c).part(1)
        if got != exp:
            fails.append({"a": a, "b": b, "w": w, "l": l, "m": m,
                          "got": state_to_json(got), "expected": state_to_json(exp)})
    return fails


def _weyl(rng, cases):
    fails = []
    for _ in range(cases):
        n = rng.randint(1, 2)
        size = rng.randint(1, n + 1)
        I = tuple(sorted(rng.sample(range(4), size)))
        J = tuple(sorted(rng.sample(range(4), size)))
        img = classical_subst(det_dij(I, J), n)
        # second fundamental theorem: (n+1)-minors vanish; smaller ones survive
        if bool(img) == (size == n + 1):
            fails.append({"n": n, "I": list(I), "J": list(J), "image_zero": not img})
    return fails


def _lw(rng, cases):
    from .w1inf import lw_report

    fails = []
    for _ in range(cases):
        n = rng.randint(1, 3)
        rep = lw_report(n)
        if not rep["ok"]:
            fails.append({"n": n, "failed": rep["failed"]})
    return fails


SUITES = {"identities": _identities, "parabolic": _parabolic, "weyl": _weyl, "lw": _lw}


def run_suite(name, seed=0, cases=20):
    if name not in SUITES:
        raise KeyError(name)
    rng = rng_for(seed)
    fails = SUITES[name](rng, cases)
    return {"suite": name, "seed": seed, "cases": cases, "passed": cases - len(fails),
            "failures": fails}


def all_weyl_cases(n, maxe=3):
    """Every (I, J) of size n+1 with entries <= maxe."""
    lists = list(combinations(range(maxe + 1), n + 1))
    return [(I, J) for I in lists for J in lists]
