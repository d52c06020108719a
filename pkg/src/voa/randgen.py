"""Seeded random inputs for the verification suites."""
from __future__ import annotations

import random
from fractions import Fraction

from .fock import (
    BetaGammaSystem, CurrentSystem, Deriv, Gen, Lin, Wick, _expr_weight,
)


def generators(system):
    if isinstance(system, CurrentSystem):
        return [Gen("J", l) for l in range(3)]
    names = ("beta", "gamma") if isinstance(system, BetaGammaSystem) else ("b", "c")
    return [Gen(nm, i) for nm in names for i in range(system.n)]


def _atom(system, rng):
    g = rng.choice(generators(system))
    k = rng.choice([0, 0, 0, 1, 2])
    return Deriv(k, g) if k else g


def random_field(system, rng, maxw=3):
    """A small random field of weight <= maxw (homogeneity not required)."""
    for _ in range(100):
        kind = rng.random()
        if kind < 0.4:
            e = _atom(system, rng)
        elif kind < 0.75:
            e = Wick(_atom(system, rng), _atom(system, rng))
        else:
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 3)) or Fraction(1)
            # both summands share a shape, so the sum has a definite parity
            if rng.random() < 0.5:
                e = Lin.of([(1, _atom(system, rng)), (c, _atom(system, rng))])
            else:
                e = Lin.of([(1, Wick(_atom(system, rng), _atom(system, rng))),
                            (c, Wick(_atom(system, rng), _atom(system, rng)))])
        if _expr_weight(system, e) <= maxw:
            return e
    return generators(system)[0]


def random_triple(system, rng, maxw=3):
    return tuple(random_field(system, rng, maxw) for _ in range(3))


def rng_for(seed):
    return random.Random(seed)

